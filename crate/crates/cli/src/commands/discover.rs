use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use optdg_core::{
    build_model, count_relations, dependency_measures, export_lp, extract_graph, quality_with, solve_with,
    validate_paths, SolveStats, SolveStatus,
};
use serde::Serialize;

use crate::failure::{CliResult, Failure};
use crate::options::{InputArgs, ModelArgs, SolverArgs};
use crate::report::pretty_json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportLp {
    /// Write the model and stop.
    Only,
    /// Write the model, then solve it.
    Also,
}

#[derive(Debug, Clone, Args)]
pub struct DiscoverArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Directory receiving graph.dot, graph.json, quality.json and summary.json.
    #[arg(long, short = 'o')]
    pub out_dir: PathBuf,
    /// Also write the model as model.lp.
    #[arg(long, value_enum)]
    pub export_lp: Option<ExportLp>,
}

#[derive(Serialize)]
struct Summary<'a> {
    tasks: usize,
    arcs: usize,
    objective: f64,
    variables: usize,
    rows: usize,
    stats: &'a SolveStats,
}

/// Files written so far; removed again unless the run completes.
struct Artifacts {
    written: Vec<PathBuf>,
    keep: bool,
}

impl Artifacts {
    fn write(&mut self, path: PathBuf, text: &str) -> CliResult<()> {
        std::fs::write(&path, text).map_err(|e| Failure::write(&path, e))?;
        self.written.push(path);
        Ok(())
    }
}

impl Drop for Artifacts {
    fn drop(&mut self) {
        if !self.keep {
            for p in &self.written {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}

pub fn run(args: &DiscoverArgs) -> CliResult<()> {
    let log = args.input.load()?;
    let cfg = args.model.resolve()?;
    let limits = args.solver.limits()?;
    let options = args.solver.options();
    let (start, end) = (log.start().expect("normalized log"), log.end().expect("normalized log"));

    let meas = dependency_measures(&count_relations(&log));
    let model = build_model(&meas, start, end, &cfg)?.with_task_names(log.task_names())?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Failure::write(&args.out_dir, e))?;
    let dir: &Path = &args.out_dir;
    let mut out = Artifacts {
        written: Vec::new(),
        keep: false,
    };
    if let Some(mode) = args.export_lp {
        out.write(dir.join("model.lp"), &export_lp(&model))?;
        if mode == ExportLp::Only {
            out.keep = true;
            println!("wrote {}", dir.join("model.lp").display());
            return Ok(());
        }
    }

    let sol = solve_with(&model, &limits, &options.backend)?;
    if sol.status != SolveStatus::Optimal {
        return Err(Failure::unsolved(sol.status));
    }
    let graph = extract_graph(&model, &sol, start, end)?;
    if let Err(v) = validate_paths(&graph) {
        return Err(Failure::internal(format!("validate stage: {v}")));
    }
    let quality = quality_with(&log, &graph, options.fitness_mode)?;
    let summary = Summary {
        tasks: graph.num_tasks(),
        arcs: graph.arc_count(),
        objective: sol.objective_value.unwrap_or(f64::NAN),
        variables: model.num_vars(),
        rows: model.num_rows(),
        stats: &sol.stats,
    };
    out.write(dir.join("graph.dot"), &graph.to_dot())?;
    out.write(dir.join("graph.json"), &(graph.to_json() + "\n"))?;
    out.write(dir.join("quality.json"), &pretty_json(&quality)?)?;
    out.write(dir.join("summary.json"), &pretty_json(&summary)?)?;
    out.keep = true;

    println!(
        "{} tasks, {} arcs, objective {:.6}, {} nodes, {:.3} s",
        summary.tasks, summary.arcs, summary.objective, sol.stats.nodes, sol.stats.wall_time
    );
    println!(
        "FiM {:.4}  PrM {:.4}  F {:.4}  AN {}",
        quality.fim, quality.prm, quality.fscore, quality.an
    );
    println!("wrote {}", dir.display());
    Ok(())
}
