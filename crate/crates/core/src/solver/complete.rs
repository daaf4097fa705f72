use std::collections::VecDeque;

use crate::model::{IlpModel, RowFamily, VarKind};

/// Shortest-path distances along arcs (`forward`) or against them.
pub(crate) fn distances(e: &[bool], n: usize, from: usize, forward: bool) -> Vec<Option<usize>> {
    let mut dist = vec![None; n];
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for w in 0..n {
            let arc = if forward { e[v * n + w] } else { e[w * n + v] };
            if arc && dist[w].is_none() {
                dist[w] = Some(dist[v].unwrap() + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// The best assignment of `model` whose arc variables equal `e`, or `None`
/// when some task is off every start-to-end path.
///
/// Breadth-first trees give the `x`/`y` arcs and their depths the orderings;
/// two-cycle flags follow from `e` and each punishment variable is raised only
/// when its threshold row needs it. Rows outside the built-in families are not
/// consulted, so callers must still check feasibility.
pub(crate) fn complete(model: &IlpModel, e: &[bool]) -> Option<Vec<f64>> {
    let n = model.n;
    let (s, t) = (model.start.index(), model.end.index());
    let from_start = distances(e, n, s, true);
    let to_end = distances(e, n, t, false);
    if from_start.iter().chain(&to_end).any(Option::is_none) {
        return None;
    }
    let mut x = vec![0.0; model.num_vars()];
    for i in 0..n {
        for j in 0..n {
            if e[i * n + j] {
                x[model.e(i, j).0] = 1.0;
                if i != j && e[j * n + i] {
                    x[model.r(i, j).0] = 1.0;
                }
            }
        }
    }
    for j in (0..n).filter(|&j| j != s) {
        let dj = from_start[j]?;
        let parent = (0..n).find(|&i| e[i * n + j] && from_start[i] == Some(dj - 1))?;
        x[model.x(parent, j).0] = 1.0;
    }
    for i in (0..n).filter(|&i| i != t) {
        let di = to_end[i]?;
        let next = (0..n).find(|&j| e[i * n + j] && to_end[j] == Some(di - 1))?;
        x[model.y(i, next).0] = 1.0;
    }
    for i in 0..n {
        x[model.u(i).0] = from_start[i]? as f64;
        x[model.q(i).0] = (n - 1 - to_end[i]?) as f64;
    }
    for row in &model.rows {
        if !matches!(
            row.family,
            RowFamily::DepThreshold | RowFamily::SelfLoopThreshold | RowFamily::LoopThreshold
        ) {
            continue;
        }
        if row.relation.holds(row.activity(&x), row.rhs, 1e-9) {
            continue;
        }
        let punish = row.terms.iter().find(|(v, _)| {
            matches!(
                model.variables[v.0].kind,
                VarKind::Forced(..) | VarKind::ForceL(..) | VarKind::ForceSl(..)
            )
        });
        if let Some(&(v, _)) = punish {
            x[v.0] = model.variables[v.0].upper;
        }
    }
    Some(x)
}

/// Arc matrix from fractional arc values, with tasks that fall off a
/// start-to-end path reconnected through their strongest candidate arcs.
pub(crate) fn round_arcs(model: &IlpModel, values: &[f64]) -> Vec<bool> {
    let n = model.n;
    let (s, t) = (model.start.index(), model.end.index());
    let weight = |i: usize, j: usize| values[model.e(i, j).0] + 1e-3 * model.objective[model.e(i, j).0];
    let allowed = |i: usize, j: usize| i != j && i != t && j != s;
    let mut e: Vec<bool> = (0..n * n).map(|k| values[model.e(k / n, k % n).0] > 0.5).collect();
    loop {
        let from_start = distances(&e, n, s, true);
        let Some(j) = (0..n).find(|&j| from_start[j].is_none()) else {
            break;
        };
        let best = (0..n)
            .filter(|&i| from_start[i].is_some() && allowed(i, j))
            .max_by(|&a, &b| weight(a, j).total_cmp(&weight(b, j)).then(b.cmp(&a)));
        match best {
            Some(i) => e[i * n + j] = true,
            None => break,
        }
    }
    loop {
        let to_end = distances(&e, n, t, false);
        let Some(i) = (0..n).find(|&i| to_end[i].is_none()) else {
            break;
        };
        let best = (0..n)
            .filter(|&j| to_end[j].is_some() && allowed(i, j))
            .max_by(|&a, &b| weight(i, a).total_cmp(&weight(i, b)).then(b.cmp(&a)));
        match best {
            Some(j) => e[i * n + j] = true,
            None => break,
        }
    }
    e
}
