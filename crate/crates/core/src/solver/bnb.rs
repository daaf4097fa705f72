use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::Instant;

use super::complete::{complete, round_arcs};
use super::cuts::{LeRow, PathCuts};
use super::relax::{implied_bounds, implied_rows, outcome, values, LpOutcome, LpRelaxation};
use super::{Solution, SolveLimits, SolveStats, SolveStatus, FEASIBILITY_TOL};
use crate::error::{Error, Result};
use crate::model::{IlpModel, VarKind};

/// Resolution of the best-bound ordering key.
const BOUND_QUANTUM: f64 = 1e-9;
/// Absolute slack below which a node cannot improve on the incumbent.
const PRUNE_TOL: f64 = 1e-9;
/// Rounds of cut-set separation at the root.
const MAX_CUT_ROUNDS: usize = 50;
/// Least time granted to a single simplex call, in seconds.
const MIN_LP_SECONDS: f64 = 10.0;

/// A bound change on the path from the root, shared between siblings.
struct Change {
    var: usize,
    lower: f64,
    upper: f64,
    parent: Option<Rc<Change>>,
}

struct Node {
    bound: f64,
    key: i64,
    depth: u32,
    seq: u64,
    path: Option<Rc<Change>>,
    /// Solved relaxation at this node, kept while memory allows.
    state: Option<Box<microlp::Solution>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .cmp(&other.key)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

fn path_changes(path: &Option<Rc<Change>>) -> Vec<&Change> {
    let mut out = Vec::new();
    let mut cur = path.as_deref();
    while let Some(c) = cur {
        out.push(c);
        cur = c.parent.as_deref();
    }
    out.reverse();
    out
}

struct Search<'a> {
    /// Time cap of one simplex call.
    lp_seconds: f64,
    deadline: Option<Instant>,
    model: &'a IlpModel,
    base_bounds: Vec<(f64, f64)>,
    vars: Vec<microlp::Variable>,
    root: Box<microlp::Solution>,
    integer_vars: Vec<usize>,
    priority_vars: Vec<usize>,
    other_vars: Vec<usize>,
    /// Rows added to every relaxation on top of the model's own.
    pool: Vec<LeRow>,
    lp_iterations: u64,
}

impl Search<'_> {
    fn cold_solve(&mut self, path: &Option<Rc<Change>>) -> Result<Option<Box<microlp::Solution>>> {
        let mut bounds = self.base_bounds.clone();
        for c in path_changes(path) {
            let (lo, hi) = bounds[c.var];
            bounds[c.var] = (lo.max(c.lower), hi.min(c.upper));
        }
        let mut relax = LpRelaxation::with_rows(self.model, &bounds, &self.pool);
        let left = self.deadline.map_or(f64::INFINITY, |d| {
            d.saturating_duration_since(Instant::now()).as_secs_f64()
        });
        relax.set_time_limit(self.lp_seconds.min(left));
        match relax.solve()? {
            LpOutcome::Optimal(sol) => {
                self.lp_iterations += sol.stats().lp_iterations;
                Ok(Some(sol))
            }
            LpOutcome::Infeasible => Ok(None),
        }
    }

    /// Applies one bound change to a solved parent, warm-starting when the
    /// change fixes a variable.
    fn child(
        &mut self,
        parent: Box<microlp::Solution>,
        change: &Change,
        path: &Option<Rc<Change>>,
    ) -> Result<Option<Box<microlp::Solution>>> {
        if change.lower != change.upper {
            return self.cold_solve(path);
        }
        let before = parent.stats().lp_iterations;
        match outcome((*parent).fix_var(self.vars[change.var], change.lower)) {
            Ok(LpOutcome::Optimal(sol)) => {
                self.lp_iterations += sol.stats().lp_iterations.saturating_sub(before);
                Ok(Some(sol))
            }
            Ok(LpOutcome::Infeasible) => Ok(None),
            Err(e) => {
                log::debug!("warm re-solve failed ({e}); solving the node from scratch");
                self.cold_solve(path)
            }
        }
    }

    /// Re-solves a node whose relaxation state was dropped.
    fn rebuild(&mut self, path: &Option<Rc<Change>>) -> Result<Option<Box<microlp::Solution>>> {
        let changes = path_changes(path);
        if changes.iter().any(|c| c.lower != c.upper) {
            return self.cold_solve(path);
        }
        let mut state = self.root.clone();
        for c in changes {
            let before = state.stats().lp_iterations;
            match outcome((*state).fix_var(self.vars[c.var], c.lower)) {
                Ok(LpOutcome::Optimal(sol)) => {
                    self.lp_iterations += sol.stats().lp_iterations.saturating_sub(before);
                    state = sol;
                }
                Ok(LpOutcome::Infeasible) => return Ok(None),
                Err(_) => return self.cold_solve(path),
            }
        }
        Ok(Some(state))
    }

    /// Most fractional integer variable, lowest index on ties. Variables
    /// that carry objective weight are branched on before the rest.
    fn branching_var(&self, x: &[f64]) -> Option<(usize, f64)> {
        [&self.priority_vars, &self.other_vars].into_iter().find_map(|class| {
            let mut best: Option<(usize, f64)> = None;
            for &k in class {
                let frac = (x[k] - x[k].floor()).min(x[k].ceil() - x[k]);
                if frac > FEASIBILITY_TOL && best.is_none_or(|(_, f)| frac > f) {
                    best = Some((k, frac));
                }
            }
            best.map(|(k, _)| (k, x[k]))
        })
    }

    /// Feasible assignments derived from a relaxation: plain rounding, and
    /// the best completion of the rounded and repaired arc set.
    fn candidates(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut out = vec![self.rounded(x)];
        if let Some(c) = complete(self.model, &round_arcs(self.model, x)) {
            out.push(c);
        }
        out.retain(|c| self.model.check_feasible(c, FEASIBILITY_TOL).is_ok());
        out
    }

    fn rounded(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        for &k in &self.integer_vars {
            out[k] = out[k].round();
        }
        for (k, v) in out.iter_mut().enumerate() {
            let (lo, hi) = self.base_bounds[k];
            *v = v.clamp(lo, hi);
        }
        out
    }
}

/// Time cap of one simplex call: a generous multiple of the expected cold
/// solve for the model size, never past the overall time limit.
fn lp_time_cap(model: &IlpModel, limits: &SolveLimits) -> f64 {
    let size = (model.num_vars() + model.num_rows()) as f64;
    let cap = MIN_LP_SECONDS.max(1e-5 * size.powf(1.5));
    limits.time_limit.map_or(cap, |t| cap.min(t))
}

fn key(bound: f64) -> i64 {
    (bound / BOUND_QUANTUM).round() as i64
}

pub(crate) fn branch_and_bound(model: &IlpModel, limits: &SolveLimits) -> Result<Solution> {
    let started = Instant::now();
    let base_bounds = implied_bounds(model);
    let pool = implied_rows(model);
    let lp_seconds = lp_time_cap(model, limits);
    let mut relax = LpRelaxation::with_rows(model, &base_bounds, &pool);
    relax.set_time_limit(lp_seconds);
    let vars = relax.vars().to_vec();
    let integer_vars: Vec<usize> = model
        .variables
        .iter()
        .enumerate()
        .filter(|&(k, v)| v.integer && base_bounds[k].0 < base_bounds[k].1)
        .map(|(k, _)| k)
        .collect();
    let (priority_vars, other_vars) = integer_vars
        .iter()
        .partition(|&&k| model.objective[k] != 0.0 || matches!(model.variables[k].kind, VarKind::E(..)));
    let stats_at = |nodes: u64, lp_iterations: u64, best_bound: Option<f64>| SolveStats {
        nodes,
        wall_time: started.elapsed().as_secs_f64(),
        lp_iterations,
        best_bound,
    };
    if base_bounds.iter().any(|(lo, hi)| lo > hi) {
        return Ok(Solution::infeasible(stats_at(0, 0, None)));
    }

    let over_time = || limits.time_limit.is_some_and(|t| started.elapsed().as_secs_f64() >= t);
    let mut root = match relax.solve() {
        Ok(LpOutcome::Optimal(sol)) => sol,
        Ok(LpOutcome::Infeasible) => return Ok(Solution::infeasible(stats_at(1, 0, None))),
        Err(_) if over_time() => {
            return Ok(Solution {
                status: SolveStatus::LimitReached,
                assignment: None,
                objective_value: None,
                stats: stats_at(1, 0, None),
            })
        }
        Err(e) => return Err(e),
    };
    let mut search = Search {
        model,
        base_bounds,
        vars,
        lp_iterations: root.stats().lp_iterations,
        lp_seconds,
        deadline: limits
            .time_limit
            .and_then(|t| std::time::Duration::try_from_secs_f64(t).ok())
            .and_then(|d| started.checked_add(d)),
        root: root.clone(),
        integer_vars,
        priority_vars,
        other_vars,
        pool,
    };
    let mut cuts = PathCuts::new();
    'rounds: for _ in 0..MAX_CUT_ROUNDS {
        let x = values(&root, &search.vars);
        let found = cuts.separate(model, &x);
        if found.is_empty() {
            break;
        }
        let mut state = root.clone();
        for (terms, rhs) in &found {
            let expr: Vec<(microlp::Variable, f64)> = terms.iter().map(|&(v, c)| (search.vars[v.0], c)).collect();
            let before = state.stats().lp_iterations;
            match outcome((*state).add_constraint(expr, microlp::ComparisonOp::Le, *rhs)) {
                Ok(LpOutcome::Optimal(sol)) => {
                    search.lp_iterations += sol.stats().lp_iterations.saturating_sub(before);
                    state = sol;
                }
                Ok(LpOutcome::Infeasible) => return Ok(Solution::infeasible(stats_at(1, search.lp_iterations, None))),
                Err(e) => {
                    log::debug!("adding a cut failed ({e}); keeping the previous relaxation");
                    break 'rounds;
                }
            }
        }
        search.pool.extend(found);
        log::debug!("cut round: bound {} -> {}", root.objective(), state.objective());
        root = state;
    }
    search.root = root.clone();
    let warm_cap = (500_000 / (model.num_vars() + model.num_rows()).max(1)).clamp(8, 256);

    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let root_bound = root.objective();
    let mut current = Some(Node {
        bound: root_bound,
        key: key(root_bound),
        depth: 0,
        seq: 0,
        path: None,
        state: Some(root),
    });
    let mut warm = 0usize;
    let mut seq = 1u64;
    let mut nodes = 0u64;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let cutoff = |inc: &Option<(f64, Vec<f64>)>| {
        inc.as_ref()
            .map(|(obj, _)| obj + PRUNE_TOL.max(limits.gap_tolerance * obj.abs()))
    };

    let mut limit_hit = false;
    loop {
        let node = match current.take() {
            Some(node) => node,
            None => match heap.pop() {
                Some(node) => {
                    if node.state.is_some() {
                        warm -= 1;
                    }
                    node
                }
                None => break,
            },
        };
        if cutoff(&incumbent).is_some_and(|c| node.bound <= c) {
            continue;
        }
        let over_nodes = limits.node_limit.is_some_and(|n| nodes >= n);
        if over_time() || over_nodes {
            heap.push(Node { state: None, ..node });
            limit_hit = true;
            break;
        }
        nodes += 1;
        if nodes.is_multiple_of(1000) {
            let best = heap.peek().map_or(node.bound, |n| n.bound.max(node.bound));
            log::debug!(
                "node {nodes}: open {} best bound {best} incumbent {:?} depth {}",
                heap.len(),
                incumbent.as_ref().map(|(o, _)| *o),
                node.depth
            );
        }

        let state = match node.state {
            Some(s) => s,
            None => match search.rebuild(&node.path) {
                Ok(Some(s)) => s,
                Ok(None) => continue,
                Err(_) if over_time() => {
                    limit_hit = true;
                    break;
                }
                Err(e) => return Err(e),
            },
        };
        let x = values(&state, &search.vars);
        let mut solved = false;
        for candidate in search.candidates(&x) {
            let obj = model.evaluate_objective(&candidate);
            solved |= obj >= node.bound - PRUNE_TOL;
            if incumbent.as_ref().is_none_or(|(best, _)| obj > *best + PRUNE_TOL) {
                log::debug!("node {nodes}: incumbent {obj} (bound {})", node.bound);
                incumbent = Some((obj, candidate));
            }
        }
        if solved {
            continue;
        }
        let Some((var, value)) = search.branching_var(&x) else {
            // Integral relaxation that failed the row check after rounding.
            return Err(Error::Solver(format!(
                "integral relaxation at node {nodes} violates the model; numerical trouble"
            )));
        };

        let (lo, hi) = search.base_bounds[var];
        let binary = search.model.variables[var].is_binary();
        let up = Rc::new(Change {
            var,
            lower: value.ceil(),
            upper: if binary { value.ceil() } else { hi },
            parent: node.path.clone(),
        });
        let down = Rc::new(Change {
            var,
            lower: if binary { value.floor() } else { lo },
            upper: value.floor(),
            parent: node.path.clone(),
        });
        let up_path = Some(up.clone());
        let down_path = Some(down.clone());
        let children = search
            .child(state.clone(), &up, &up_path)
            .and_then(|u| Ok((u, search.child(state, &down, &down_path)?)));
        let (up_state, down_state) = match children {
            Ok(pair) => pair,
            Err(_) if over_time() => {
                limit_hit = true;
                break;
            }
            Err(e) => return Err(e),
        };
        for (path, child) in [(up_path, up_state), (down_path, down_state)] {
            let Some(child) = child else { continue };
            let bound = child.objective().min(node.bound);
            if cutoff(&incumbent).is_some_and(|c| bound <= c) {
                continue;
            }
            let mut next = Node {
                bound,
                key: key(bound),
                depth: node.depth + 1,
                seq,
                path,
                state: Some(child),
            };
            seq += 1;
            // Dive into the first surviving child; queue the other.
            if current.is_none() {
                current = Some(next);
                continue;
            }
            if warm < warm_cap {
                warm += 1;
            } else {
                next.state = None;
            }
            heap.push(next);
        }
    }

    let open_bound = heap
        .iter()
        .chain(current.iter())
        .map(|n| n.bound)
        .fold(None, |acc: Option<f64>, b| Some(acc.map_or(b, |a| a.max(b))));
    let stats = stats_at(
        nodes,
        search.lp_iterations,
        open_bound.or(incumbent.as_ref().map(|(o, _)| *o)),
    );
    Ok(match (incumbent, limit_hit) {
        (Some((obj, x)), false) => Solution {
            status: SolveStatus::Optimal,
            assignment: Some(x),
            objective_value: Some(obj),
            stats,
        },
        (None, false) => Solution::infeasible(stats),
        (inc, true) => Solution {
            status: SolveStatus::LimitReached,
            objective_value: inc.as_ref().map(|(o, _)| *o),
            assignment: inc.map(|(_, x)| x),
            stats,
        },
    })
}
