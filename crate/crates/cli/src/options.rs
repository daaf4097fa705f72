//! Arguments shared by several subcommands.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use optdg_core::log::{parse_csv, parse_xes, CsvMapping};
use optdg_core::{Backend, DiscoveryConfig, DiscoveryOptions, EventLog, FitnessMode, SolveLimits};

use crate::failure::{CliResult, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogFormat {
    /// Chosen from the file extension.
    Auto,
    Xes,
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Event log: XES, CSV (one row per event) or the canonical JSON format.
    pub log: PathBuf,
    #[arg(long, value_enum, default_value_t = LogFormat::Auto)]
    pub format: LogFormat,
    #[arg(long, default_value = "case")]
    pub case_column: String,
    #[arg(long, default_value = "activity")]
    pub activity_column: String,
    #[arg(long, default_value = "order")]
    pub order_column: String,
}

impl InputArgs {
    /// Reads the log and designates its unique initial and final tasks.
    pub fn load(&self) -> CliResult<EventLog> {
        let format = match self.format {
            LogFormat::Auto => detect_format(&self.log)?,
            f => f,
        };
        let file =
            File::open(&self.log).map_err(|e| Failure::input(format!("cannot read {}: {e}", self.log.display())))?;
        let reader = BufReader::new(file);
        let parsed = match format {
            LogFormat::Xes => parse_xes(reader),
            LogFormat::Csv => parse_csv(
                reader,
                &CsvMapping {
                    case: self.case_column.clone(),
                    activity: self.activity_column.clone(),
                    order: self.order_column.clone(),
                },
            ),
            LogFormat::Json | LogFormat::Auto => EventLog::read_json(reader),
        };
        let log = parsed.map_err(|e| Failure::input(format!("parse stage: {}: {e}", self.log.display())))?;
        Ok(log.ensure_unique_endpoints())
    }
}

fn detect_format(path: &Path) -> CliResult<LogFormat> {
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("xes") => Ok(LogFormat::Xes),
        Some("csv") => Ok(LogFormat::Csv),
        Some("json") => Ok(LogFormat::Json),
        _ => Err(Failure::input(format!(
            "cannot tell the format of {}; pass --format",
            path.display()
        ))),
    }
}

/// Discovery parameters: an optional flat `key = value` file, overridden
/// by individual flags.
#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// File with DepThresh, SLoopThresh, LoopThresh, MaxArcsRatio,
    /// MaxOutputs, MaxInputs, alpha, beta, big_m and sparsity_epsilon.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dep_thresh: Option<f64>,
    #[arg(long)]
    pub sloop_thresh: Option<f64>,
    #[arg(long)]
    pub loop_thresh: Option<f64>,
    #[arg(long)]
    pub max_arcs_ratio: Option<f64>,
    #[arg(long)]
    pub max_outputs: Option<u32>,
    #[arg(long)]
    pub max_inputs: Option<u32>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub big_m: Option<f64>,
    #[arg(long)]
    pub sparsity_epsilon: Option<f64>,
}

impl ModelArgs {
    pub fn resolve(&self) -> CliResult<DiscoveryConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => DiscoveryConfig::default(),
        };
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut cfg.dep_thresh, self.dep_thresh);
        set(&mut cfg.sloop_thresh, self.sloop_thresh);
        set(&mut cfg.loop_thresh, self.loop_thresh);
        set(&mut cfg.max_arcs_ratio, self.max_arcs_ratio);
        set(&mut cfg.alpha, self.alpha);
        set(&mut cfg.beta, self.beta);
        set(&mut cfg.sparsity_epsilon, self.sparsity_epsilon);
        if let Some(v) = self.max_outputs {
            cfg.max_outputs = v;
        }
        if let Some(v) = self.max_inputs {
            cfg.max_inputs = v;
        }
        if self.big_m.is_some() {
            cfg.big_m = self.big_m;
        }
        Ok(cfg)
    }
}

pub fn load_config(path: &Path) -> CliResult<DiscoveryConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::input(format!("config {}: {}", path.display(), e.message())))
}

#[derive(Debug, Clone, Default, Args)]
pub struct SolverArgs {
    /// Wall-clock limit per solve, in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Branch-and-bound node limit per solve.
    #[arg(long)]
    pub node_limit: Option<u64>,
    /// Relative optimality gap accepted before stopping.
    #[arg(long, default_value_t = 0.0)]
    pub gap: f64,
    /// External MILP solver command; `{lp}` and `{sol}` are replaced by the
    /// model and solution file paths.
    #[arg(long)]
    pub solver_cmd: Option<String>,
    /// Count fitting events with the trace-level violation flags.
    #[arg(long)]
    pub fim_strict_pseudocode: bool,
}

impl SolverArgs {
    pub fn limits(&self) -> CliResult<SolveLimits> {
        if self.time_limit.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
            return Err(Failure::input("--time-limit must be positive"));
        }
        if !(self.gap.is_finite() && self.gap >= 0.0) {
            return Err(Failure::input("--gap must be non-negative"));
        }
        Ok(SolveLimits {
            time_limit: self.time_limit,
            node_limit: self.node_limit,
            gap_tolerance: self.gap,
        })
    }

    pub fn options(&self) -> DiscoveryOptions {
        let backend = match &self.solver_cmd {
            Some(cmd) => Backend::External(cmd.clone()),
            None => Backend::from_env().unwrap_or_default(),
        };
        DiscoveryOptions {
            backend,
            fitness_mode: self.fitness_mode(),
        }
    }

    pub fn fitness_mode(&self) -> FitnessMode {
        if self.fim_strict_pseudocode {
            FitnessMode::TraceFlags
        } else {
            FitnessMode::EventLocal
        }
    }
}

/// Writes `text` to `path`, or to standard output when `path` is absent.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::write(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
