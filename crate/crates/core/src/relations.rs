//! Succession statistics of an event log.

use serde::{Deserialize, Serialize};

use crate::log::EventLog;
use crate::matrix::SquareMatrix;

/// Task frequencies, direct successions and length-two repetitions.
///
/// `direct[(a, b)]` counts the positions where `b` immediately follows `a`;
/// `repeat2[(a, b)]` counts the positions starting a pattern `a, b, a`, with
/// overlapping patterns all counted. All counts are weighted by trace
/// multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCounts {
    pub n: usize,
    pub freq: Vec<u64>,
    pub direct: SquareMatrix<u64>,
    pub repeat2: SquareMatrix<u64>,
}

impl RelationCounts {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            freq: vec![0; n],
            direct: SquareMatrix::new(n),
            repeat2: SquareMatrix::new(n),
        }
    }

    /// Adds `count` copies of the task sequence `events` (given as indices).
    pub fn add_trace(&mut self, events: &[usize], count: u64) {
        for &a in events {
            self.freq[a] += count;
        }
        for w in events.windows(2) {
            self.direct[(w[0], w[1])] += count;
        }
        for w in events.windows(3) {
            if w[0] == w[2] {
                self.repeat2[(w[0], w[1])] += count;
            }
        }
    }

    /// Entrywise sum; both operands must be over the same alphabet.
    pub fn merge(&mut self, other: &RelationCounts) {
        assert_eq!(self.n, other.n, "alphabet sizes differ");
        for (a, b) in self.freq.iter_mut().zip(&other.freq) {
            *a += b;
        }
        for ((i, j), v) in other.direct.iter() {
            self.direct[(i, j)] += v;
        }
        for ((i, j), v) in other.repeat2.iter() {
            self.repeat2[(i, j)] += v;
        }
    }
}

pub fn count_relations(log: &EventLog) -> RelationCounts {
    let mut counts = RelationCounts::zeros(log.num_tasks());
    let mut buf = Vec::new();
    for (trace, count) in log.traces() {
        buf.clear();
        buf.extend(trace.events().iter().map(|t| t.index()));
        counts.add_trace(&buf, count);
    }
    counts
}

/// The eventually-follows relation: `fl[(x, y)]` holds iff some trace has an
/// occurrence of `x` strictly before an occurrence of `y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventuallyFollows {
    pub fl: SquareMatrix<bool>,
}

impl EventuallyFollows {
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.fl[(x, y)]
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.fl.iter().filter(|(_, &v)| v).map(|(p, _)| p).collect()
    }

    pub fn count(&self) -> usize {
        self.fl.iter().filter(|(_, &v)| v).count()
    }
}

pub fn eventually_follows(log: &EventLog) -> EventuallyFollows {
    let n = log.num_tasks();
    let mut fl = SquareMatrix::new(n);
    let mut seen_after = vec![false; n];
    for (trace, _) in log.traces() {
        seen_after.iter_mut().for_each(|v| *v = false);
        // Scanning backwards, every task already seen occurs after the current event.
        for &a in trace.events().iter().rev() {
            for (b, &after) in seen_after.iter().enumerate() {
                if after {
                    fl[(a.index(), b)] = true;
                }
            }
            seen_after[a.index()] = true;
        }
    }
    EventuallyFollows { fl }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn log(traces: &[(&[&str], u64)]) -> EventLog {
        EventLog::from_traces(traces.iter().map(|(t, c)| (t.iter().copied(), *c))).unwrap()
    }

    fn id(l: &EventLog, name: &str) -> usize {
        l.alphabet().get(name).unwrap().index()
    }

    #[test]
    fn ababa_counts() {
        let l = log(&[(&["a", "b", "a", "b", "a"], 1)]);
        let c = count_relations(&l);
        let (a, b) = (id(&l, "a"), id(&l, "b"));
        assert_eq!(c.freq[a], 3);
        assert_eq!(c.freq[b], 2);
        assert_eq!(c.direct[(a, b)], 2);
        assert_eq!(c.direct[(b, a)], 2);
        assert_eq!(c.repeat2[(a, b)], 2);
        assert_eq!(c.repeat2[(b, a)], 1);
    }

    #[test]
    fn multiplicity_weights_counts() {
        let l = log(&[(&["s", "a", "e"], 10)]);
        let c = count_relations(&l);
        let (s, a, e) = (id(&l, "s"), id(&l, "a"), id(&l, "e"));
        assert_eq!(c.direct[(s, a)], 10);
        assert_eq!(c.direct[(a, e)], 10);
        assert_eq!(c.direct[(s, e)], 0);
        assert!(c.repeat2.iter().all(|(_, &v)| v == 0));
    }

    #[test]
    fn eventually_follows_fixtures() {
        let l = log(&[(&["s", "a", "e"], 1)]);
        let f = eventually_follows(&l);
        let (s, a, e) = (id(&l, "s"), id(&l, "a"), id(&l, "e"));
        assert_eq!(f.pairs(), vec![(s, a), (s, e), (a, e)]);

        let f = eventually_follows(&log(&[(&["a", "a"], 1)]));
        assert!(f.get(0, 0));

        let l = log(&[(&["s", "a", "b", "e"], 1), (&["s", "b", "a", "e"], 1)]);
        let f = eventually_follows(&l);
        let (a, b) = (id(&l, "a"), id(&l, "b"));
        assert!(f.get(a, b) && f.get(b, a));
        assert!(!f.get(a, a));
    }

    fn arb_traces() -> impl Strategy<Value = Vec<(Vec<usize>, u64)>> {
        prop::collection::vec((prop::collection::vec(0usize..4, 1..9), 1u64..5), 1..6)
    }

    fn build(traces: &[(Vec<usize>, u64)]) -> EventLog {
        let names = ["a", "b", "c", "d"];
        let mut builder = crate::log::LogBuilder::with_alphabet(names);
        for (k, (t, c)) in traces.iter().enumerate() {
            builder
                .push_trace(&k.to_string(), t.iter().map(|&i| names[i]), *c)
                .unwrap();
        }
        builder.finish()
    }

    proptest! {
        #[test]
        fn count_invariants(traces in arb_traces()) {
            let l = build(&traces);
            let c = count_relations(&l);
            prop_assert_eq!(c.freq.iter().sum::<u64>(), l.total_events());
            let mass: u64 = traces.iter().map(|(t, m)| m * (t.len() as u64 - 1)).sum();
            prop_assert_eq!(c.direct.iter().map(|(_, v)| v).sum::<u64>(), mass);
            let f = eventually_follows(&l);
            for ((i, j), &v) in c.direct.iter() {
                prop_assert!(v <= c.freq[i] && v <= c.freq[j]);
                prop_assert!(c.repeat2[(i, j)] <= v && c.repeat2[(i, j)] <= c.direct[(j, i)]);
                if v > 0 {
                    prop_assert!(f.get(i, j));
                }
            }
        }

        #[test]
        fn linear_over_union(a in arb_traces(), b in arb_traces()) {
            let joined: Vec<_> = a.iter().chain(&b).cloned().collect();
            let mut sum = count_relations(&build(&a));
            sum.merge(&count_relations(&build(&b)));
            prop_assert_eq!(count_relations(&build(&joined)), sum);

            let (fa, fb) = (eventually_follows(&build(&a)), eventually_follows(&build(&b)));
            let fj = eventually_follows(&build(&joined));
            for ((i, j), &v) in fj.fl.iter() {
                prop_assert_eq!(v, fa.get(i, j) || fb.get(i, j));
            }
        }
    }
}
