use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use optdg_core::{count_relations, dependency_measures};
use serde::Serialize;

use crate::failure::CliResult;
use crate::options::{InputArgs, ModelArgs, SolverArgs};
use crate::report::{baseline_row, ilp_row, ratio_grid, rows_csv, threshold_grid, write_pair, Row};

/// F-score floors at which the smallest graph of each method is reported.
pub const FLOORS: [f64; 4] = [0.6, 0.7, 0.8, 0.9];

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// MaxArcsRatio grid of the ILP runs.
    #[arg(long, value_delimiter = ',')]
    pub ratios: Vec<f64>,
    /// Threshold grid of the baseline runs, applied to all three thresholds.
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Vec<f64>,
    /// Output prefix; PREFIX.csv and PREFIX.json are written.
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pick {
    pub config: String,
    pub an: usize,
    pub fim: f64,
    pub prm: f64,
    pub fscore: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloorPick {
    pub floor: f64,
    pub pick: Option<Pick>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: String,
    pub runs: usize,
    pub graphs: usize,
    pub path_failures: usize,
    /// Share of produced graphs failing the path check, in percent.
    pub path_failure_pct: f64,
    pub best: Option<Pick>,
    pub min_an: Vec<FloorPick>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub tasks: usize,
    pub traces: u64,
    pub methods: Vec<MethodSummary>,
    pub rows: Vec<Row>,
}

fn pick(r: &Row) -> Pick {
    Pick {
        config: r.config.clone(),
        an: r.an.expect("row with a graph"),
        fim: r.fim.expect("row with a graph"),
        prm: r.prm.expect("row with a graph"),
        fscore: r.fscore.expect("row with a graph"),
    }
}

/// Per-method figures over its rows. Graphs failing the path check never
/// count as the best or smallest graph.
pub fn summarize(method: &str, rows: &[Row]) -> MethodSummary {
    let mine: Vec<&Row> = rows.iter().filter(|r| r.method == method).collect();
    let graphs: Vec<&Row> = mine.iter().copied().filter(|r| r.has_graph()).collect();
    let valid: Vec<&Row> = graphs.iter().copied().filter(|r| r.paths_ok == Some(true)).collect();
    let failures = graphs.len() - valid.len();
    let f = |r: &Row| r.fscore.unwrap_or(f64::NEG_INFINITY);
    let best = valid
        .iter()
        .copied()
        .reduce(|a, b| {
            if f(b) > f(a) || (f(b) == f(a) && b.an < a.an) {
                b
            } else {
                a
            }
        })
        .map(pick);
    let min_an = FLOORS
        .iter()
        .map(|&floor| FloorPick {
            floor,
            pick: valid
                .iter()
                .copied()
                .filter(|r| f(r) >= floor)
                .reduce(|a, b| {
                    if b.an < a.an || (b.an == a.an && f(b) > f(a)) {
                        b
                    } else {
                        a
                    }
                })
                .map(pick),
        })
        .collect();
    MethodSummary {
        method: method.into(),
        runs: mine.len(),
        graphs: graphs.len(),
        path_failures: failures,
        path_failure_pct: if graphs.is_empty() {
            0.0
        } else {
            100.0 * failures as f64 / graphs.len() as f64
        },
        best,
        min_an,
    }
}

pub fn build_report(args: &CompareArgs) -> CliResult<CompareReport> {
    let log = args.input.load()?;
    let base = args.model.resolve()?;
    let limits = args.solver.limits()?;
    let options = args.solver.options();
    let ratios = if args.ratios.is_empty() {
        ratio_grid()
    } else {
        args.ratios.clone()
    };
    let thresholds = if args.thresholds.is_empty() {
        threshold_grid()
    } else {
        args.thresholds.clone()
    };

    let meas = dependency_measures(&count_relations(&log));
    let mut rows = Vec::with_capacity(ratios.len() + thresholds.len());
    for (k, &ratio) in ratios.iter().enumerate() {
        let mut cfg = base.clone();
        cfg.max_arcs_ratio = ratio;
        let mut row = ilp_row(
            &log,
            &meas,
            &cfg,
            &limits,
            &options,
            format!("C{}", k + 1),
            format!("MaxArcsRatio={ratio}"),
        );
        row.solve_time = None;
        rows.push(row);
    }
    for (k, &t) in thresholds.iter().enumerate() {
        rows.push(baseline_row(
            &log,
            &meas,
            t,
            t,
            t,
            &options,
            format!("C{}", k + 1),
            format!("thresholds={t}"),
        ));
    }
    Ok(CompareReport {
        tasks: log.num_tasks(),
        traces: log.total_traces(),
        methods: vec![summarize("ilp", &rows), summarize("baseline", &rows)],
        rows,
    })
}

pub fn render(report: &CompareReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} tasks, {} traces", report.tasks, report.traces);
    let _ = writeln!(out, "{:<9} {:>6} {:>7} {:>8}", "method", "runs", "graphs", "paths%");
    for m in &report.methods {
        let _ = writeln!(
            out,
            "{:<9} {:>6} {:>7} {:>7.1}%",
            m.method, m.runs, m.graphs, m.path_failure_pct
        );
    }
    let _ = writeln!(out, "\nbest F-score (AN_b, FiM_b, PrM_b, F_b)");
    for m in &report.methods {
        match &m.best {
            Some(p) => {
                let _ = writeln!(
                    out,
                    "{:<9} {:<4} {:>4} {:>8.4} {:>8.4} {:>8.4}",
                    m.method, p.config, p.an, p.fim, p.prm, p.fscore
                );
            }
            None => {
                let _ = writeln!(out, "{:<9} -", m.method);
            }
        }
    }
    let _ = write!(out, "\nmin AN at F-score floor\n{:<9}", "method");
    for f in FLOORS {
        let _ = write!(out, " {:>6}", format!(">={f}"));
    }
    out.push('\n');
    for m in &report.methods {
        let _ = write!(out, "{:<9}", m.method);
        for fp in &m.min_an {
            let cell = fp.pick.as_ref().map_or_else(|| "-".to_string(), |p| p.an.to_string());
            let _ = write!(out, " {cell:>6}");
        }
        out.push('\n');
    }
    out
}

pub fn run(args: &CompareArgs) -> CliResult<()> {
    let report = build_report(args)?;
    print!("{}", render(&report));
    if let Some(prefix) = &args.out {
        let (csv, json) = write_pair(prefix, &rows_csv(&report.rows, false)?, &report)?;
        println!("wrote {} and {}", csv.display(), json.display());
    }
    Ok(())
}
