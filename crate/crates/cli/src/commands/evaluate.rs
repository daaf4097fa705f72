use std::path::PathBuf;

use clap::Args;
use optdg_core::{quality_with, DependencyGraph, QualityReport};

use crate::failure::{CliResult, Failure};
use crate::options::{emit, InputArgs};
use crate::report::pretty_json;

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Graph in the JSON format written by `discover`.
    #[arg(long, short = 'g')]
    pub graph: PathBuf,
    /// Count fitting events with the trace-level violation flags.
    #[arg(long)]
    pub fim_strict_pseudocode: bool,
    /// Write the report here instead of standard output.
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

pub fn table(q: &QualityReport) -> String {
    let f = &q.fitness;
    format!(
        "FiM      {:>10.6}\nPrM      {:>10.6}\nF-score  {:>10.6}\nAN       {:>10}\n\
         fitting events {} of {} in {} traces; penalty {:.6}\n\
         input violations {} events / {} traces; output violations {} events / {} traces\n\
         eventually-follows pairs kept {} of {}\n",
        q.fim,
        q.prm,
        q.fscore,
        q.an,
        f.afe,
        f.nel,
        f.ntl,
        f.penalty,
        f.aewpr,
        f.ntewpr,
        f.aewpo,
        f.ntewpo,
        q.precision.matched,
        q.precision.possible,
    )
}

/// Scores a graph against the log: the report goes to standard output (or
/// `--out`) as JSON, the table to standard error.
pub fn run(args: &EvaluateArgs) -> CliResult<()> {
    let log = args.input.load()?;
    let text = std::fs::read_to_string(&args.graph)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", args.graph.display())))?;
    let graph = DependencyGraph::from_json(&text)
        .map_err(|e| Failure::input(format!("parse stage: {}: {e}", args.graph.display())))?;
    let mode = if args.fim_strict_pseudocode {
        optdg_core::FitnessMode::TraceFlags
    } else {
        optdg_core::FitnessMode::EventLocal
    };
    let q = quality_with(&log, &graph, mode).map_err(|e| Failure::input(format!("evaluate stage: {e}")))?;
    eprint!("{}", table(&q));
    emit(args.out.as_deref(), &pretty_json(&q)?)
}
