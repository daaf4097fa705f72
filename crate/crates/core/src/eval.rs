//! Fitness, precision, F-score and size of a dependency graph against a log.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{reachability, DependencyGraph};
use crate::log::{EventLog, TaskId};
use crate::relations::eventually_follows;

/// How fitting events are counted during replay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitnessMode {
    /// An event fits when it has neither a missing prerequisite nor a
    /// missing successor of its own.
    #[default]
    EventLocal,
    /// Once a trace shows a violation, none of its later events fit.
    TraceFlags,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    /// Fitting events.
    pub afe: u64,
    /// Events missing every input task before them.
    pub aewpr: u64,
    /// Events missing every output task after them.
    pub aewpo: u64,
    /// Traces with at least one input violation.
    pub ntewpr: u64,
    /// Traces with at least one output violation.
    pub ntewpo: u64,
    /// Events in the log.
    pub nel: u64,
    /// Traces in the log.
    pub ntl: u64,
    pub penalty: f64,
    pub fim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionReport {
    /// Graph-reachable pairs also observed as eventually-follows in the log.
    pub matched: u64,
    /// Graph-reachable pairs.
    pub possible: u64,
    pub prm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub fim: f64,
    pub prm: f64,
    pub fscore: f64,
    /// Number of arcs, self-loops included.
    pub an: usize,
    pub fitness: FitnessReport,
    pub precision: PrecisionReport,
}

/// Graph task of every log task, by name.
fn task_map(log: &EventLog, g: &DependencyGraph) -> Result<Vec<TaskId>> {
    log.task_names()
        .iter()
        .map(|name| {
            g.task_id(name)
                .ok_or_else(|| Error::Evaluation(format!("log task {name:?} is not a task of the graph")))
        })
        .collect()
}

pub fn fitness(log: &EventLog, g: &DependencyGraph) -> Result<FitnessReport> {
    fitness_with(log, g, FitnessMode::EventLocal)
}

/// Replays every trace against the graph's input and output arcs.
pub fn fitness_with(log: &EventLog, g: &DependencyGraph, mode: FitnessMode) -> Result<FitnessReport> {
    let map = task_map(log, g)?;
    let m = g.num_tasks();
    let inputs: Vec<Vec<usize>> = (0..m)
        .map(|t| g.inputs(TaskId(t)).iter().map(|x| x.0).collect())
        .collect();
    let outputs: Vec<Vec<usize>> = (0..m)
        .map(|t| g.outputs(TaskId(t)).iter().map(|x| x.0).collect())
        .collect();

    let (mut afe, mut aewpr, mut aewpo, mut ntewpr, mut ntewpo, mut nel, mut ntl) = (0, 0, 0, 0, 0, 0, 0);
    let mut before = vec![false; m];
    let mut after_count = vec![0usize; m];
    for (trace, count) in log.traces() {
        let events: Vec<usize> = trace.events().iter().map(|t| map[t.0].0).collect();
        before.iter_mut().for_each(|v| *v = false);
        after_count.iter_mut().for_each(|v| *v = 0);
        for &a in &events {
            after_count[a] += 1;
        }
        let (mut trace_pre, mut trace_post) = (false, false);
        let mut trace_fits = 0u64;
        for &a in &events {
            after_count[a] -= 1;
            let pre = !inputs[a].is_empty() && !inputs[a].iter().any(|&x| before[x]);
            let post = !outputs[a].is_empty() && !outputs[a].iter().any(|&y| after_count[y] > 0);
            before[a] = true;
            aewpr += pre as u64 * count;
            aewpo += post as u64 * count;
            trace_pre |= pre;
            trace_post |= post;
            let fits = match mode {
                FitnessMode::EventLocal => !pre && !post,
                FitnessMode::TraceFlags => !trace_pre && !trace_post,
            };
            trace_fits += fits as u64;
        }
        afe += trace_fits * count;
        nel += events.len() as u64 * count;
        ntl += count;
        ntewpr += trace_pre as u64 * count;
        ntewpo += trace_post as u64 * count;
    }
    if nel == 0 {
        return Err(Error::Evaluation("log has no events".into()));
    }
    let penalty = aewpr as f64 / (ntl - ntewpr + 1) as f64 + aewpo as f64 / (ntl - ntewpo + 1) as f64;
    let fim = (afe as f64 - penalty) / nel as f64;
    if fim < 0.0 {
        log::warn!("fitness is negative ({fim}); penalties exceed the fitting events");
    }
    Ok(FitnessReport {
        afe,
        aewpr,
        aewpo,
        ntewpr,
        ntewpo,
        nel,
        ntl,
        penalty,
        fim,
    })
}

/// Share of the graph's reachable task pairs that the log shows in
/// eventually-follows order.
pub fn precision(log: &EventLog, g: &DependencyGraph) -> Result<PrecisionReport> {
    let fl = eventually_follows(log);
    let reach = reachability(g);
    let log_id: Vec<Option<usize>> = g
        .tasks()
        .iter()
        .map(|name| log.alphabet().get(name).map(|t| t.0))
        .collect();
    let mut matched = 0u64;
    let mut possible = 0u64;
    for ((x, y), &r) in reach.reach.iter() {
        if !r {
            continue;
        }
        possible += 1;
        if let (Some(lx), Some(ly)) = (log_id[x], log_id[y]) {
            matched += fl.get(lx, ly) as u64;
        }
    }
    if possible == 0 {
        return Err(Error::Evaluation("empty reachability: the graph has no arcs".into()));
    }
    Ok(PrecisionReport {
        matched,
        possible,
        prm: matched as f64 / possible as f64,
    })
}

/// Harmonic mean of fitness and precision; zero when both are zero.
pub fn f_score(fim: f64, prm: f64) -> f64 {
    if fim + prm == 0.0 {
        0.0
    } else {
        2.0 * fim * prm / (fim + prm)
    }
}

pub fn quality(log: &EventLog, g: &DependencyGraph) -> Result<QualityReport> {
    quality_with(log, g, FitnessMode::EventLocal)
}

pub fn quality_with(log: &EventLog, g: &DependencyGraph, mode: FitnessMode) -> Result<QualityReport> {
    let fitness = fitness_with(log, g, mode)?;
    let precision = precision(log, g)?;
    Ok(QualityReport {
        fim: fitness.fim,
        prm: precision.prm,
        fscore: f_score(fitness.fim, precision.prm),
        an: g.arc_count(),
        fitness,
        precision,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn log(traces: &[(&[&str], u64)]) -> EventLog {
        EventLog::from_traces(traces.iter().map(|(t, c)| (t.iter().copied(), *c)))
            .unwrap()
            .ensure_unique_endpoints()
    }

    fn graph(tasks: &[&str], arcs: &[(&str, &str)]) -> DependencyGraph {
        DependencyGraph::from_names(tasks, arcs, tasks[0], tasks[tasks.len() - 1]).unwrap()
    }

    #[test]
    fn perfect_fit() {
        let l = log(&[(&["s", "a", "e"], 2)]);
        let g = graph(&["s", "a", "e"], &[("s", "a"), ("a", "e")]);
        let f = fitness(&l, &g).unwrap();
        assert_eq!((f.afe, f.aewpr, f.aewpo, f.ntewpr, f.ntewpo), (6, 0, 0, 0, 0));
        assert_eq!(f.penalty, 0.0);
        assert_eq!(f.fim, 1.0);
        let q = quality(&l, &g).unwrap();
        assert_eq!((q.prm, q.fscore, q.an), (1.0, 1.0, 2));
    }

    #[test]
    fn missing_prerequisite() {
        let l = log(&[(&["s", "a", "e"], 1)]);
        let g = graph(&["s", "a", "e"], &[("s", "e"), ("a", "a"), ("a", "e")]);
        let f = fitness(&l, &g).unwrap();
        assert_eq!((f.aewpr, f.ntewpr, f.afe, f.aewpo, f.ntl), (1, 1, 2, 0, 1));
        assert_eq!(f.penalty, 1.0);
        assert!((f.fim - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn trace_flag_mode_stops_counting_after_violation() {
        let l = log(&[(&["s", "a", "b", "e"], 1)]);
        let g = graph(&["s", "a", "b", "e"], &[("s", "b"), ("a", "a"), ("a", "b"), ("b", "e")]);
        let local = fitness_with(&l, &g, FitnessMode::EventLocal).unwrap();
        let strict = fitness_with(&l, &g, FitnessMode::TraceFlags).unwrap();
        assert_eq!(local.afe, 3);
        assert_eq!(strict.afe, 1);
        assert_eq!(local.aewpr, strict.aewpr);
    }

    #[test]
    fn start_never_misses_a_prerequisite() {
        let l = log(&[(&["s", "e"], 1)]);
        let g = graph(&["s", "e"], &[("s", "e")]);
        assert_eq!(fitness(&l, &g).unwrap().aewpr, 0);
    }

    #[test]
    fn unmapped_task_is_named() {
        let l = log(&[(&["s", "z", "e"], 1)]);
        let g = graph(&["s", "e"], &[("s", "e")]);
        match fitness(&l, &g) {
            Err(Error::Evaluation(msg)) => assert!(msg.contains("\"z\"")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precision_fixtures() {
        let l = log(&[(&["s", "a", "e"], 1)]);
        let chain = graph(&["s", "a", "e"], &[("s", "a"), ("a", "e")]);
        let p = precision(&l, &chain).unwrap();
        assert_eq!((p.matched, p.possible, p.prm), (3, 3, 1.0));

        let fork = graph(&["s", "a", "b", "e"], &[("s", "a"), ("s", "b"), ("a", "e"), ("b", "e")]);
        let p = precision(&l, &fork).unwrap();
        assert_eq!((p.matched, p.possible), (3, 5));
        assert!((p.prm - 0.6).abs() < 1e-15);

        let empty = graph(&["s", "e"], &[]);
        assert!(matches!(
            precision(&log(&[(&["s", "e"], 1)]), &empty),
            Err(Error::Evaluation(_))
        ));
    }

    #[test]
    fn closure_graph_is_precise() {
        let l = log(&[(&["s", "a", "b", "e"], 2), (&["s", "b", "e"], 1)]);
        let fl = eventually_follows(&l);
        let tasks = l.task_names().to_vec();
        let arcs = fl.pairs().into_iter().map(|(x, y)| (TaskId(x), TaskId(y)));
        let g = DependencyGraph::new(tasks, arcs, l.start().unwrap(), l.end().unwrap()).unwrap();
        assert_eq!(precision(&l, &g).unwrap().prm, 1.0);
    }

    #[test]
    fn f_score_values() {
        assert!((f_score(1.0, 0.6) - 0.75).abs() < 1e-15);
        assert_eq!(f_score(1.0, 1.0), 1.0);
        assert_eq!(f_score(0.0, 0.7), 0.0);
        assert_eq!(f_score(0.0, 0.0), 0.0);
    }

    fn arb_case() -> impl Strategy<Value = (EventLog, DependencyGraph)> {
        let names = ["a", "b", "c"];
        let traces = prop::collection::vec((prop::collection::vec(0usize..3, 1..6), 1u64..4), 1..5);
        let arcs = prop::collection::vec(any::<bool>(), 25);
        (traces, arcs).prop_map(move |(traces, bits)| {
            let log = EventLog::from_traces(
                traces
                    .into_iter()
                    .map(|(t, c)| (t.into_iter().map(|k| names[k]).collect::<Vec<_>>(), c)),
            )
            .unwrap();
            let log = EventLog::from_traces(log.named_multiset().into_iter().map(|(mut t, c)| {
                t.insert(0, "s".into());
                t.push("e".into());
                (t, c)
            }))
            .unwrap()
            .ensure_unique_endpoints();
            let tasks = ["s", "a", "b", "c", "e"];
            let arcs: Vec<(&str, &str)> = (0..5)
                .flat_map(|i| (0..5).map(move |j| (i, j)))
                .filter(|&(i, j)| bits[i * 5 + j] && j != 0 && i != 4)
                .map(|(i, j)| (tasks[i], tasks[j]))
                .collect();
            let g = DependencyGraph::from_names(&tasks, &arcs, "s", "e").unwrap();
            (log, g)
        })
    }

    proptest! {
        #[test]
        fn report_identities((l, g) in arb_case()) {
            let f = fitness(&l, &g).unwrap();
            let penalty = f.aewpr as f64 / (f.ntl - f.ntewpr + 1) as f64
                + f.aewpo as f64 / (f.ntl - f.ntewpo + 1) as f64;
            prop_assert_eq!(f.penalty, penalty);
            prop_assert_eq!(f.fim, (f.afe as f64 - penalty) / f.nel as f64);
            prop_assert!(f.afe <= f.nel && f.aewpr <= f.nel && f.ntewpr <= f.ntl);
            if let Ok(q) = quality(&l, &g) {
                if q.fim >= 0.0 {
                    prop_assert!(q.fscore <= 2.0 * q.fim.min(q.prm) + 1e-12);
                }
            }
        }

        #[test]
        fn new_unobserved_pairs_lower_precision((l, g) in arb_case(), a in 0usize..4, b in 1usize..5) {
            let extra = (TaskId(a), TaskId(b));
            let Ok(before) = precision(&l, &g) else { return Ok(()) };
            let g2 = DependencyGraph::new(g.tasks().to_vec(), g.arcs().chain([extra]), g.start(), g.end()).unwrap();
            let after = precision(&l, &g2).unwrap();
            prop_assert!(after.matched >= before.matched && after.possible >= before.possible);
            if after.matched == before.matched {
                prop_assert!(after.prm <= before.prm);
            }
        }
    }
}
