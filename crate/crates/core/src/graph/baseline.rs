use std::collections::BTreeSet;

use super::DependencyGraph;
use crate::error::{Error, Result};
use crate::log::TaskId;
use crate::measures::DependencyMeasures;

/// A plain threshold miner: keeps every arc, self-loop and two-cycle whose
/// measure is positive and reaches its threshold, then gives each task
/// lacking an input (output) arc from (to) another task its best-scoring one.
///
/// The result is not guaranteed to place every task on a path from the
/// initial to the final task.
pub fn baseline_threshold_miner(
    meas: &DependencyMeasures,
    tasks: &[String],
    start: TaskId,
    end: TaskId,
    dep_thresh: f64,
    sloop_thresh: f64,
    loop_thresh: f64,
) -> Result<DependencyGraph> {
    let n = meas.n;
    if tasks.len() != n {
        return Err(Error::Graph(format!(
            "{} task names for {n} measured tasks",
            tasks.len()
        )));
    }
    let (s, e) = (start.0, end.0);
    let allowed = |i: usize, j: usize| i != e && j != s;
    let mut arcs = BTreeSet::new();

    for i in 0..n {
        for j in 0..n {
            if i != j && allowed(i, j) {
                let d = meas.d[(i, j)];
                if d > 0.0 && d >= dep_thresh {
                    arcs.insert((i, j));
                }
            }
        }
        if allowed(i, i) && meas.s[i] > 0.0 && meas.s[i] >= sloop_thresh {
            arcs.insert((i, i));
        }
        for j in i + 1..n {
            let l = meas.l[(i, j)];
            if allowed(i, j) && allowed(j, i) && l > 0.0 && l >= loop_thresh {
                arcs.insert((i, j));
                arcs.insert((j, i));
            }
        }
    }

    let best = |candidates: &mut dyn Iterator<Item = usize>, score: &dyn Fn(usize) -> f64| {
        let mut best: Option<(usize, f64)> = None;
        for c in candidates {
            let v = score(c);
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((c, v));
            }
        }
        best.map(|(c, _)| c)
    };
    for t in (0..n).filter(|&t| t != s) {
        if !arcs.iter().any(|&(a, b)| b == t && a != t) {
            let mut sources = (0..n).filter(|&a| a != t && a != e);
            if let Some(a) = best(&mut sources, &|a| meas.d[(a, t)]) {
                arcs.insert((a, t));
            }
        }
    }
    for t in (0..n).filter(|&t| t != e) {
        if !arcs.iter().any(|&(a, b)| a == t && b != t) {
            let mut targets = (0..n).filter(|&b| b != t && b != s);
            if let Some(b) = best(&mut targets, &|b| meas.d[(t, b)]) {
                arcs.insert((t, b));
            }
        }
    }

    DependencyGraph::new(
        tasks.to_vec(),
        arcs.into_iter().map(|(a, b)| (TaskId(a), TaskId(b))),
        start,
        end,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_paths;
    use crate::log::EventLog;
    use crate::measures::dependency_measures;
    use crate::relations::count_relations;

    fn mine(traces: &[(&[&str], u64)], dep: f64, sloop: f64, lp: f64) -> DependencyGraph {
        let log = EventLog::from_traces(traces.iter().map(|(t, c)| (t.iter().copied(), *c)))
            .unwrap()
            .ensure_unique_endpoints();
        let meas = dependency_measures(&count_relations(&log));
        baseline_threshold_miner(
            &meas,
            log.task_names(),
            log.start().unwrap(),
            log.end().unwrap(),
            dep,
            sloop,
            lp,
        )
        .unwrap()
    }

    fn arcs(g: &DependencyGraph) -> Vec<(&str, &str)> {
        g.arcs().map(|(a, b)| (g.name(a), g.name(b))).collect()
    }

    #[test]
    fn concurrency_log() {
        let g = mine(
            &[(&["s", "a", "b", "e"], 10), (&["s", "b", "a", "e"], 10)],
            0.9,
            0.9,
            0.9,
        );
        let mut got = arcs(&g);
        got.sort();
        assert_eq!(got, vec![("a", "e"), ("b", "e"), ("s", "a"), ("s", "b")]);
    }

    #[test]
    fn zero_threshold_keeps_positive_arcs() {
        let g = mine(&[(&["s", "a", "b", "e"], 3), (&["s", "b", "e"], 1)], 0.0, 0.0, 0.0);
        let mut got = arcs(&g);
        got.sort();
        assert_eq!(got, vec![("a", "b"), ("b", "e"), ("s", "a"), ("s", "b")]);
    }

    #[test]
    fn repair_adds_best_input() {
        let g = mine(&[(&["s", "a", "e"], 1), (&["s", "e"], 100)], 0.9, 0.9, 0.9);
        assert!(arcs(&g).contains(&("s", "a")));
        assert!(arcs(&g).contains(&("a", "e")));
        assert!(validate_paths(&g).is_ok());
    }

    #[test]
    fn loop_fixture_breaks_paths() {
        let g = mine(
            &[(&["s", "a", "b", "a", "b", "a", "b", "e"], 1), (&["s", "c", "e"], 100)],
            0.9,
            0.9,
            0.5,
        );
        let v = validate_paths(&g).unwrap_err();
        assert_eq!(v.unreachable_from_start, ["a", "b"]);
        assert_eq!(v.cannot_reach_end, ["a", "b"]);
    }
}
