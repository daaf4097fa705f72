//! The `optdg` command line: discovery, evaluation, sweeps, comparison with
//! a threshold baseline, model export and synthetic logs.
//!
//! Exit codes: 0 success, 1 infeasible model or solver limit, 2 input
//! error, 3 internal error.

use clap::{Parser, Subcommand};

pub mod commands;
pub mod failure;
pub mod options;
pub mod report;

pub use failure::{CliResult, Failure};

#[derive(Debug, Parser)]
#[command(
    name = "optdg",
    version,
    about = "Optimal dependency-graph discovery from event logs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discover a dependency graph and write it with its quality report.
    Discover(commands::discover::DiscoverArgs),
    /// Score a graph against a log.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Compare the ILP with the threshold baseline over configuration grids.
    Compare(commands::compare::CompareArgs),
    /// Discover once per value of one parameter.
    Sweep(commands::sweep::SweepArgs),
    /// Generate a synthetic log.
    Synth(commands::synth::SynthArgs),
    /// Write the discovery model in LP format.
    ExportLp(commands::dump::ExportLpArgs),
    /// Print the succession counts of a log as JSON.
    RelationsDump(commands::dump::DumpArgs),
    /// Print the dependency measures of a log as JSON.
    MeasuresDump(commands::dump::DumpArgs),
}

pub fn run(cli: &Cli) -> CliResult<()> {
    use commands::*;
    match &cli.command {
        Command::Discover(a) => discover::run(a),
        Command::Evaluate(a) => evaluate::run(a),
        Command::Compare(a) => compare::run(a),
        Command::Sweep(a) => sweep::run(a),
        Command::Synth(a) => synth::run(a),
        Command::ExportLp(a) => dump::lp(a),
        Command::RelationsDump(a) => dump::relations(a),
        Command::MeasuresDump(a) => dump::measures(a),
    }
}
