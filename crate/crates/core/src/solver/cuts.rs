use std::collections::{HashSet, VecDeque};

use crate::model::{IlpModel, VarId};

/// A `<=` row over model variables.
pub(crate) type LeRow = (Vec<(VarId, f64)>, f64);

const CUT_TOL: f64 = 1e-6;

/// Maximum flow from `s` to `t` over a dense capacity matrix, and the set of
/// nodes still reachable from `s` in the residual graph.
fn max_flow(cap: &[f64], n: usize, s: usize, t: usize) -> (f64, Vec<bool>) {
    let mut residual = cap.to_vec();
    let mut total = 0.0;
    loop {
        let mut parent = vec![usize::MAX; n];
        parent[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if v == t {
                break;
            }
            for w in 0..n {
                if parent[w] == usize::MAX && residual[v * n + w] > CUT_TOL * 1e-3 {
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        if parent[t] == usize::MAX {
            let side = parent.iter().map(|&p| p != usize::MAX).collect();
            return (total, side);
        }
        let mut push = f64::INFINITY;
        let mut w = t;
        while w != s {
            let v = parent[w];
            push = push.min(residual[v * n + w]);
            w = v;
        }
        let mut w = t;
        while w != s {
            let v = parent[w];
            residual[v * n + w] -= push;
            residual[w * n + v] += push;
            w = v;
        }
        total += push;
        if total >= 1.0 {
            return (total, Vec::new());
        }
    }
}

/// Cut-set rows violated by `values`: every set holding the initial task
/// but not all tasks must be left by an arc, and every set holding the final
/// task but not all tasks must be entered by one.
pub(crate) struct PathCuts {
    seen: HashSet<(bool, Vec<bool>)>,
}

impl PathCuts {
    pub(crate) fn new() -> Self {
        Self { seen: HashSet::new() }
    }

    pub(crate) fn separate(&mut self, model: &IlpModel, values: &[f64]) -> Vec<LeRow> {
        let n = model.n;
        let (s, t) = (model.start.index(), model.end.index());
        let mut forward = vec![0.0; n * n];
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                forward[i * n + j] = values[model.e(i, j).0].max(0.0);
            }
        }
        let backward: Vec<f64> = (0..n * n).map(|k| forward[(k % n) * n + k / n]).collect();
        let mut rows = Vec::new();
        for (reversed, cap, root) in [(false, &forward, s), (true, &backward, t)] {
            for target in (0..n).filter(|&v| v != root) {
                let (flow, side) = max_flow(cap, n, root, target);
                if flow >= 1.0 - CUT_TOL || !self.seen.insert((reversed, side.clone())) {
                    continue;
                }
                let mut terms = Vec::new();
                for i in (0..n).filter(|&i| side[i]) {
                    for j in (0..n).filter(|&j| !side[j]) {
                        let v = if reversed { model.e(j, i) } else { model.e(i, j) };
                        terms.push((v, -1.0));
                    }
                }
                rows.push((terms, -1.0));
            }
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flow_and_cut_side() {
        // 0 -> 1 (0.4), 0 -> 2 (1), 2 -> 1 (0.3)
        let mut cap = vec![0.0; 9];
        cap[1] = 0.4;
        cap[2] = 1.0;
        cap[2 * 3 + 1] = 0.3;
        let (flow, side) = max_flow(&cap, 3, 0, 1);
        assert!((flow - 0.7).abs() < 1e-12);
        assert_eq!(side, vec![true, false, true]);
    }
}
