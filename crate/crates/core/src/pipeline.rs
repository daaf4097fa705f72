//! Log-to-graph discovery in one call.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{quality_with, FitnessMode, QualityReport};
use crate::graph::{validate_paths, DependencyGraph, PathViolation};
use crate::log::EventLog;
use crate::measures::{dependency_measures, DependencyMeasures};
use crate::model::{build_model, extract_graph, DiscoveryConfig};
use crate::relations::count_relations;
use crate::solver::{solve_with, Backend, SolveLimits, SolveStats, SolveStatus};

/// A discovered graph together with its scores and solver statistics.
#[derive(Debug, Clone, Serialize)]
pub struct Discovery {
    #[serde(skip)]
    pub graph: DependencyGraph,
    pub paths_ok: bool,
    pub path_violation: Option<PathViolation>,
    pub quality: QualityReport,
    pub objective: f64,
    pub stats: SolveStats,
    pub num_vars: usize,
    pub num_rows: usize,
}

#[derive(Debug, Clone, Default)]
pub struct DiscoveryOptions {
    pub backend: Backend,
    pub fitness_mode: FitnessMode,
}

/// Discovers an optimal dependency graph with the built-in solver.
///
/// Logs without designated endpoints are normalized first.
pub fn discover(log: &EventLog, cfg: &DiscoveryConfig, limits: &SolveLimits) -> Result<Discovery> {
    discover_with(log, cfg, limits, &DiscoveryOptions::default())
}

pub fn discover_with(
    log: &EventLog,
    cfg: &DiscoveryConfig,
    limits: &SolveLimits,
    options: &DiscoveryOptions,
) -> Result<Discovery> {
    let normalized;
    let log = if log.endpoints().is_some() {
        log
    } else {
        normalized = log.clone().ensure_unique_endpoints();
        &normalized
    };
    let meas = dependency_measures(&count_relations(log));
    discover_from_measures(log, &meas, cfg, limits, options)
}

/// Discovery for precomputed measures of `log`.
pub fn discover_from_measures(
    log: &EventLog,
    meas: &DependencyMeasures,
    cfg: &DiscoveryConfig,
    limits: &SolveLimits,
    options: &DiscoveryOptions,
) -> Result<Discovery> {
    let (start, end) = match log.endpoints() {
        Some(ep) => (ep.start, ep.end),
        None => return Err(Error::Internal("log has no designated endpoints".into())),
    };
    let model = build_model(meas, start, end, cfg)?.with_task_names(log.task_names())?;
    let sol = solve_with(&model, limits, &options.backend)?;
    if sol.status != SolveStatus::Optimal {
        return Err(Error::Unsolved(sol.status));
    }
    let graph = extract_graph(&model, &sol, start, end)?;
    let path_violation = validate_paths(&graph).err();
    let quality = quality_with(log, &graph, options.fitness_mode)?;
    Ok(Discovery {
        paths_ok: path_violation.is_none(),
        path_violation,
        quality,
        objective: sol.objective_value.unwrap_or(f64::NAN),
        stats: sol.stats,
        num_vars: model.num_vars(),
        num_rows: model.num_rows(),
        graph,
    })
}
