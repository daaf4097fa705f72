//! Optimal dependency-graph discovery for heuristic process mining.
//!
//! The crate turns an event log into direct-succession statistics, derives
//! dependency measures from them, and selects the arc set of a dependency
//! graph by solving an integer linear program exactly. Every task of a
//! discovered graph lies on a path from the initial to the final task, even
//! when the graph contains loops. Graphs (discovered or hand-made) can be
//! scored with replay fitness, eventually-follows precision, their F-score,
//! and their arc count.
//!
//! The usual pipeline is:
//!
//! ```
//! use optdg_core::log::EventLog;
//! use optdg_core::{discover, DiscoveryConfig, SolveLimits};
//!
//! let log = EventLog::from_traces([(vec!["s", "a", "e"], 10)])
//!     .unwrap()
//!     .ensure_unique_endpoints();
//! let found = discover(&log, &DiscoveryConfig::default(), &SolveLimits::default()).unwrap();
//! assert_eq!(found.graph.arc_count(), 2);
//! assert!(found.paths_ok);
//! ```

pub mod error;
pub mod eval;
pub mod graph;
pub mod log;
pub mod matrix;
pub mod measures;
pub mod model;
pub mod pipeline;
pub mod relations;
pub mod solver;

pub use error::{Error, Result, Stage};
pub use eval::{
    f_score, fitness, fitness_with, precision, quality, quality_with, FitnessMode, FitnessReport, PrecisionReport,
    QualityReport,
};
pub use graph::{baseline_threshold_miner, reachability, validate_paths, DependencyGraph, PathViolation, Reachability};
pub use log::{ensure_unique_endpoints, EventLog, TaskId, Trace};
pub use measures::{dependency_measures, DependencyMeasures};
pub use model::{build_model, export_lp, extract_graph, DiscoveryConfig, IlpModel, VarId, VarKind};
pub use pipeline::{discover, discover_from_measures, discover_with, Discovery, DiscoveryOptions};
pub use relations::{count_relations, eventually_follows, EventuallyFollows, RelationCounts};
pub use solver::{
    brute_force_solve, lp_relax_solve, solve, solve_with, Backend, Solution, SolveLimits, SolveStats, SolveStatus,
};
