use std::path::PathBuf;

use clap::Args;
use optdg_core::{build_model, count_relations, dependency_measures, eventually_follows, export_lp};
use serde::Serialize;

use crate::failure::CliResult;
use crate::options::{emit, InputArgs, ModelArgs};
use crate::report::pretty_json;

#[derive(Debug, Clone, Args)]
pub struct DumpArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExportLpArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Named<'a, T: Serialize> {
    tasks: &'a [String],
    start: usize,
    end: usize,
    #[serde(flatten)]
    data: T,
}

pub fn relations(args: &DumpArgs) -> CliResult<()> {
    let log = args.input.load()?;
    #[derive(Serialize)]
    struct Relations {
        #[serde(flatten)]
        counts: optdg_core::RelationCounts,
        eventually_follows: optdg_core::matrix::SquareMatrix<bool>,
    }
    let data = Relations {
        counts: count_relations(&log),
        eventually_follows: eventually_follows(&log).fl,
    };
    emit(args.out.as_deref(), &pretty_json(&named(&log, data))?)
}

pub fn measures(args: &DumpArgs) -> CliResult<()> {
    let log = args.input.load()?;
    let meas = dependency_measures(&count_relations(&log));
    emit(args.out.as_deref(), &pretty_json(&named(&log, meas))?)
}

pub fn lp(args: &ExportLpArgs) -> CliResult<()> {
    let log = args.input.load()?;
    let cfg = args.model.resolve()?;
    let meas = dependency_measures(&count_relations(&log));
    let (start, end) = (log.start().expect("normalized log"), log.end().expect("normalized log"));
    let model = build_model(&meas, start, end, &cfg)?.with_task_names(log.task_names())?;
    emit(args.out.as_deref(), &export_lp(&model))
}

fn named<T: Serialize>(log: &optdg_core::EventLog, data: T) -> Named<'_, T> {
    Named {
        tasks: log.task_names(),
        start: log.start().expect("normalized log").index(),
        end: log.end().expect("normalized log").index(),
        data,
    }
}
