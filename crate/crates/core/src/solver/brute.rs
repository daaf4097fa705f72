use std::time::Instant;

use super::complete::{complete, distances};
use super::{Solution, SolveStats, SolveStatus};
use crate::error::{Error, Result};
use crate::log::TaskId;
use crate::measures::DependencyMeasures;
use crate::model::{build_model, DiscoveryConfig};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 5;

/// Threshold comparisons treat values closer than this as equal.
const THRESH_TOL: f64 = 1e-9;
/// Objectives closer than this are ties.
const OBJ_TOL: f64 = 1e-9;

struct Candidate {
    objective: f64,
    arcs: usize,
    e: Vec<bool>,
}

/// Finds an optimal arc set by enumerating every arc set the endpoint rules
/// allow and scoring it directly.
///
/// Each candidate is checked against the arc budget, the degree caps, the
/// two-cycle/self-loop exclusion and the path property (by breadth-first
/// search). Threshold violations are charged the punishment they require.
/// Ties go to fewer arcs, then to the lexicographically smallest arc matrix.
/// The returned assignment is laid out like the variables of
/// [`build_model`]'s model for the same input.
pub fn brute_force_solve(
    meas: &DependencyMeasures,
    start: TaskId,
    end: TaskId,
    cfg: &DiscoveryConfig,
    cap: usize,
) -> Result<Solution> {
    let started = Instant::now();
    let n = meas.n;
    if n > cap {
        return Err(Error::Solver(format!(
            "brute force refused: {n} tasks exceed the cap of {cap}"
        )));
    }
    if !cfg.extra_rows.is_empty() {
        return Err(Error::Solver("brute force does not support extra rows".into()));
    }
    let model = build_model(meas, start, end, cfg)?;
    let (s, t) = (start.index(), end.index());
    let big_m = model.big_m;
    let budget = n as f64 * cfg.max_arcs_ratio + 1e-9;

    let cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != t && j != s)
        .collect();
    let k = cells.len();
    let mut best: Option<Candidate> = None;
    let mut e = vec![false; n * n];
    let mut enumerated = 0u64;

    'masks: for mask in 0u64..(1u64 << k) {
        enumerated += 1;
        let arcs = mask.count_ones() as usize;
        if arcs as f64 > budget {
            continue;
        }
        e.iter_mut().for_each(|v| *v = false);
        for (b, &(i, j)) in cells.iter().enumerate() {
            if mask >> (k - 1 - b) & 1 == 1 {
                e[i * n + j] = true;
            }
        }
        for i in 0..n {
            let out = (0..n).filter(|&j| e[i * n + j]).count();
            let inp = (0..n).filter(|&j| e[j * n + i]).count();
            if out > cfg.max_outputs as usize || inp > cfg.max_inputs as usize {
                continue 'masks;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && e[i * n + j] && e[j * n + i] && e[i * n + i] && e[j * n + j] {
                    continue 'masks;
                }
            }
        }
        let from_start = distances(&e, n, s, true);
        let to_end = distances(&e, n, t, false);
        if from_start.iter().chain(&to_end).any(Option::is_none) {
            continue;
        }

        let objective = score(meas, cfg, big_m, &e, n);
        let better = match &best {
            None => true,
            Some(b) => objective > b.objective + OBJ_TOL || (objective >= b.objective - OBJ_TOL && arcs < b.arcs),
        };
        if better {
            best = Some(Candidate {
                objective,
                arcs,
                e: e.clone(),
            });
        }
    }

    let stats = SolveStats {
        nodes: enumerated,
        wall_time: started.elapsed().as_secs_f64(),
        lp_iterations: 0,
        best_bound: best.as_ref().map(|b| b.objective),
    };
    let Some(best) = best else {
        return Ok(Solution::infeasible(stats));
    };
    let assignment = complete(&model, &best.e).expect("candidate satisfies the path property");
    Ok(Solution {
        status: SolveStatus::Optimal,
        objective_value: Some(best.objective),
        assignment: Some(assignment),
        stats,
    })
}

fn forced_arc(meas: &DependencyMeasures, cfg: &DiscoveryConfig, i: usize, j: usize) -> bool {
    cfg.dep_thresh > meas.d[(i, j)].max(0.0) + THRESH_TOL
}

fn forced_self_loop(meas: &DependencyMeasures, cfg: &DiscoveryConfig, i: usize) -> bool {
    cfg.sloop_thresh > meas.s[i] + THRESH_TOL
}

fn forced_two_cycle(meas: &DependencyMeasures, cfg: &DiscoveryConfig, i: usize, j: usize) -> bool {
    cfg.loop_thresh > meas.l[(i, j)] + THRESH_TOL
}

fn score(meas: &DependencyMeasures, cfg: &DiscoveryConfig, big_m: f64, e: &[bool], n: usize) -> f64 {
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if !e[i * n + j] {
                continue;
            }
            total -= cfg.sparsity_epsilon;
            if i == j {
                total += cfg.alpha * meas.s[i];
                if forced_self_loop(meas, cfg, i) {
                    total -= big_m * (1.0 - meas.s[i]);
                }
                continue;
            }
            total += meas.d[(i, j)];
            let two_cycle = e[j * n + i];
            if two_cycle {
                total += cfg.beta / 2.0 * meas.l[(i, j)];
                if i < j && forced_two_cycle(meas, cfg, i, j) {
                    total -= big_m * (1.0 - meas.l[(i, j)]);
                }
            } else if forced_arc(meas, cfg, i, j) {
                total -= big_m * (1.0 - meas.d[(i, j)]);
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SquareMatrix;
    use crate::solver::FEASIBILITY_TOL;

    #[test]
    fn two_tasks_have_one_graph() {
        let meas = DependencyMeasures::from_parts(SquareMatrix::new(2), vec![0.0; 2], SquareMatrix::new(2));
        let cfg = DiscoveryConfig::default();
        let sol = brute_force_solve(&meas, TaskId(0), TaskId(1), &cfg, 5).unwrap();
        let model = build_model(&meas, TaskId(0), TaskId(1), &cfg).unwrap();
        let x = sol.assignment.unwrap();
        assert_eq!(x[model.e(0, 1).0], 1.0);
        assert_eq!((0..4).map(|k| x[k]).sum::<f64>(), 1.0);
        model.check_feasible(&x, FEASIBILITY_TOL).unwrap();
    }

    #[test]
    fn refuses_large_alphabets() {
        let meas = DependencyMeasures::from_parts(SquareMatrix::new(6), vec![0.0; 6], SquareMatrix::new(6));
        assert!(brute_force_solve(&meas, TaskId(0), TaskId(5), &DiscoveryConfig::default(), 5).is_err());
    }
}
