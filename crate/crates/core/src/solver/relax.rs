use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{IlpModel, Relation, VarId};

/// The continuous relaxation of a model under given variable bounds.
pub struct LpRelaxation {
    problem: Problem,
    vars: Vec<Variable>,
}

/// Outcome of one relaxation solve.
pub enum LpOutcome {
    Optimal(Box<microlp::Solution>),
    Infeasible,
}

impl LpRelaxation {
    pub fn new(model: &IlpModel, bounds: &[(f64, f64)]) -> Self {
        Self::with_rows(model, bounds, &[])
    }

    /// Like [`LpRelaxation::new`], plus extra `<=` rows such as those of
    /// [`implied_rows`].
    pub fn with_rows(model: &IlpModel, bounds: &[(f64, f64)], extra: &[(Vec<(VarId, f64)>, f64)]) -> Self {
        let mut problem = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<Variable> = model
            .objective
            .iter()
            .zip(bounds)
            .map(|(&c, &b)| problem.add_var(c, b))
            .collect();
        for row in &model.rows {
            let op = match row.relation {
                Relation::Le => ComparisonOp::Le,
                Relation::Eq => ComparisonOp::Eq,
                Relation::Ge => ComparisonOp::Ge,
            };
            let terms: Vec<(Variable, f64)> = row.terms.iter().map(|&(v, c)| (vars[v.0], c)).collect();
            problem.add_constraint(terms, op, row.rhs);
        }
        for (terms, rhs) in extra {
            let terms: Vec<(Variable, f64)> = terms.iter().map(|&(v, c)| (vars[v.0], c)).collect();
            problem.add_constraint(terms, ComparisonOp::Le, *rhs);
        }
        Self { problem, vars }
    }

    pub fn from_model(model: &IlpModel) -> Self {
        let bounds: Vec<(f64, f64)> = model.variables.iter().map(|v| (v.lower, v.upper)).collect();
        Self::new(model, &bounds)
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    /// Caps every simplex call on this relaxation and on solutions derived
    /// from it; an interrupted call reports an error.
    pub fn set_time_limit(&mut self, seconds: f64) {
        self.problem
            .set_time_limit(std::time::Duration::from_secs_f64(seconds.max(0.0)));
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        outcome(self.problem.solve())
    }
}

/// `<=` rows that hold at every integer point of `model` but cut off some
/// fractional ones.
///
/// A row over integer variables with integer coefficients keeps its left side
/// with the right side rounded down. A row over binaries of the form
/// `a v - w1 - ... - wm <= b` needs at least `k = ceil(a - b)` of the `w` at
/// one whenever `v` is, which gives `k v - w1 - ... - wm <= 0`, or `v - wi <= 0`
/// for every `i` when `k >= m`.
pub fn implied_rows(model: &IlpModel) -> Vec<(Vec<(VarId, f64)>, f64)> {
    let mut out = Vec::new();
    for row in &model.rows {
        if row.relation != Relation::Le {
            continue;
        }
        let integral = row
            .terms
            .iter()
            .all(|&(v, c)| model.variables[v.0].integer && c == c.round());
        if integral && row.rhs.floor() < row.rhs {
            out.push((row.terms.clone(), row.rhs.floor()));
        }
        if !row.terms.iter().all(|(v, _)| model.variables[v.0].is_binary()) {
            continue;
        }
        let positive: Vec<_> = row.terms.iter().filter(|(_, c)| *c > 0.0).collect();
        let [&(v, a)] = positive.as_slice() else { continue };
        if row.terms.iter().any(|&(w, c)| w != v && c != -1.0) {
            continue;
        }
        let others: Vec<VarId> = row.terms.iter().map(|&(w, _)| w).filter(|&w| w != v).collect();
        let k = (a - row.rhs - 1e-9).ceil();
        if k < 1.0 {
            continue;
        }
        if k >= others.len() as f64 {
            out.extend(others.iter().map(|&w| (vec![(v, 1.0), (w, -1.0)], 0.0)));
        } else {
            let terms = std::iter::once((v, k)).chain(others.iter().map(|&w| (w, -1.0)));
            out.push((terms.collect(), 0.0));
        }
    }
    out
}

/// Variable bounds tightened by the rows that involve a single integer
/// variable, rounded to integers.
pub fn implied_bounds(model: &IlpModel) -> Vec<(f64, f64)> {
    let mut bounds: Vec<(f64, f64)> = model.variables.iter().map(|v| (v.lower, v.upper)).collect();
    for row in &model.rows {
        let [(v, a)] = row.terms[..] else { continue };
        if !model.variables[v.0].integer || a == 0.0 {
            continue;
        }
        let limit = row.rhs / a;
        let (lo, hi) = &mut bounds[v.0];
        let upper = matches!((row.relation, a > 0.0), (Relation::Le, true) | (Relation::Ge, false));
        if upper || row.relation == Relation::Eq {
            *hi = hi.min((limit + 1e-9).floor());
        }
        if !upper || row.relation == Relation::Eq {
            *lo = lo.max((limit - 1e-9).ceil());
        }
    }
    bounds
}

pub(crate) fn outcome(result: std::result::Result<microlp::SolveOutcome, microlp::Error>) -> Result<LpOutcome> {
    match result {
        Ok(microlp::SolveOutcome::Solution(sol)) => Ok(LpOutcome::Optimal(Box::new(sol))),
        Ok(microlp::SolveOutcome::Interrupted(_)) => Err(Error::Solver("LP relaxation interrupted".into())),
        Err(microlp::Error::Infeasible) => Ok(LpOutcome::Infeasible),
        Err(microlp::Error::Unbounded) => Err(Error::Solver("LP relaxation is unbounded".into())),
        Err(e) => Err(Error::Solver(format!("LP failure: {e}"))),
    }
}

pub(crate) fn values(sol: &microlp::Solution, vars: &[Variable]) -> Vec<f64> {
    vars.iter().map(|&v| sol.var_value_raw(v)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

/// Solution of the continuous relaxation of a model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpRelaxResult {
    pub status: LpStatus,
    pub values: Vec<f64>,
    /// Relaxation optimum, an upper bound on every integer solution.
    pub bound: Option<f64>,
    pub iterations: u64,
}

/// Solves the relaxation of `model` with integrality dropped.
pub fn lp_relax_solve(model: &IlpModel) -> Result<LpRelaxResult> {
    let relax = LpRelaxation::from_model(model);
    Ok(match relax.solve()? {
        LpOutcome::Optimal(sol) => LpRelaxResult {
            status: LpStatus::Optimal,
            values: values(&sol, relax.vars()),
            bound: Some(sol.objective()),
            iterations: sol.stats().lp_iterations,
        },
        LpOutcome::Infeasible => LpRelaxResult {
            status: LpStatus::Infeasible,
            values: Vec::new(),
            bound: None,
            iterations: 0,
        },
    })
}
