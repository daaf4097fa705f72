//! Exact solution of [`IlpModel`] instances.
//!
//! The default backend is a branch-and-bound search over LP relaxations.
//! [`brute_force_solve`] enumerates arc sets directly and serves as an
//! oracle for small alphabets; an external LP-format solver can be plugged
//! in through [`Backend::External`].

mod bnb;
mod brute;
mod complete;
mod cuts;
mod external;
mod relax;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::IlpModel;

pub use brute::{brute_force_solve, DEFAULT_BRUTE_FORCE_CAP};
pub use external::{parse_solution_file, solve_external, EXTERNAL_SOLVER_ENV};
pub use relax::{implied_bounds, implied_rows, lp_relax_solve, LpOutcome, LpRelaxResult, LpRelaxation, LpStatus};

/// Tolerance on integrality and on row satisfaction.
pub const FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    LimitReached,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::LimitReached => "limit_reached",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub nodes: u64,
    /// Seconds.
    pub wall_time: f64,
    pub lp_iterations: u64,
    /// Best proven upper bound on the objective, when known.
    pub best_bound: Option<f64>,
}

/// Outcome of a solve: status, best assignment found (if any) and statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: SolveStatus,
    pub assignment: Option<Vec<f64>>,
    pub objective_value: Option<f64>,
    pub stats: SolveStats,
}

impl Solution {
    pub fn infeasible(stats: SolveStats) -> Self {
        Self {
            status: SolveStatus::Infeasible,
            assignment: None,
            objective_value: None,
            stats,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveLimits {
    /// Seconds; `None` means unlimited.
    pub time_limit: Option<f64>,
    pub node_limit: Option<u64>,
    /// Relative optimality gap accepted before the search stops.
    pub gap_tolerance: f64,
}

impl Default for SolveLimits {
    fn default() -> Self {
        Self {
            time_limit: None,
            node_limit: None,
            gap_tolerance: 0.0,
        }
    }
}

/// Which engine solves the model.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    BranchAndBound,
    /// Shell command with `{lp}` and `{sol}` placeholders for the model file
    /// and the solution file it must write.
    External(String),
}

impl Backend {
    /// The external backend named by the environment, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var(EXTERNAL_SOLVER_ENV)
            .ok()
            .filter(|s| !s.trim().is_empty())
            .map(Backend::External)
    }
}

/// Solves `model` with the built-in branch-and-bound.
///
/// Branching picks the most fractional integer variable (lowest index on
/// ties), trying variables with objective weight before the rest. The search
/// dives into the first surviving child and otherwise takes the open node
/// with the best bound, then depth, then creation. Without a time limit the
/// search is deterministic.
pub fn solve(model: &IlpModel, limits: &SolveLimits) -> Result<Solution> {
    bnb::branch_and_bound(model, limits)
}

pub fn solve_with(model: &IlpModel, limits: &SolveLimits, backend: &Backend) -> Result<Solution> {
    match backend {
        Backend::BranchAndBound => solve(model, limits),
        Backend::External(cmd) => solve_external(model, cmd),
    }
}
