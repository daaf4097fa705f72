//! Result rows shared by `sweep` and `compare`, and their CSV, JSON and
//! text renderings.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use optdg_core::{
    baseline_threshold_miner, discover_from_measures, quality_with, validate_paths, DependencyMeasures,
    DiscoveryConfig, DiscoveryOptions, Error, EventLog, SolveLimits,
};
use serde::Serialize;

use crate::failure::{CliResult, Failure};

/// One discovery run of a configuration grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub method: String,
    pub config: String,
    pub params: String,
    /// `optimal`, `infeasible`, `limit_reached`, `mined` or `error`.
    pub status: String,
    pub an: Option<usize>,
    pub fim: Option<f64>,
    pub prm: Option<f64>,
    pub fscore: Option<f64>,
    pub solve_time: Option<f64>,
    pub paths_ok: Option<bool>,
    pub error: Option<String>,
}

impl Row {
    fn new(method: &str, config: String, params: String) -> Self {
        Self {
            method: method.into(),
            config,
            params,
            status: String::new(),
            an: None,
            fim: None,
            prm: None,
            fscore: None,
            solve_time: None,
            paths_ok: None,
            error: None,
        }
    }

    /// Whether the run produced a graph.
    pub fn has_graph(&self) -> bool {
        self.an.is_some()
    }

    pub fn paths_label(&self) -> &'static str {
        match self.paths_ok {
            Some(true) => "ok",
            Some(false) => "fail",
            None => "-",
        }
    }
}

pub fn ilp_row(
    log: &EventLog,
    meas: &DependencyMeasures,
    cfg: &DiscoveryConfig,
    limits: &SolveLimits,
    options: &DiscoveryOptions,
    config: String,
    params: String,
) -> Row {
    let mut row = Row::new("ilp", config, params);
    match discover_from_measures(log, meas, cfg, limits, options) {
        Ok(found) => {
            row.status = "optimal".into();
            row.an = Some(found.quality.an);
            row.fim = Some(found.quality.fim);
            row.prm = Some(found.quality.prm);
            row.fscore = Some(found.quality.fscore);
            row.solve_time = Some(found.stats.wall_time);
            row.paths_ok = Some(found.paths_ok);
        }
        Err(Error::Unsolved(status)) => row.status = status.to_string(),
        Err(e) => {
            row.status = "error".into();
            row.error = Some(Failure::from(e).message);
        }
    }
    row
}

#[allow(clippy::too_many_arguments)]
pub fn baseline_row(
    log: &EventLog,
    meas: &DependencyMeasures,
    dep: f64,
    sloop: f64,
    lp: f64,
    options: &DiscoveryOptions,
    config: String,
    params: String,
) -> Row {
    let mut row = Row::new("baseline", config, params);
    let (start, end) = (log.start().expect("normalized log"), log.end().expect("normalized log"));
    let mined = baseline_threshold_miner(meas, log.task_names(), start, end, dep, sloop, lp)
        .and_then(|g| Ok((quality_with(log, &g, options.fitness_mode)?, validate_paths(&g).is_ok())));
    match mined {
        Ok((q, paths_ok)) => {
            row.status = "mined".into();
            row.an = Some(q.an);
            row.fim = Some(q.fim);
            row.prm = Some(q.prm);
            row.fscore = Some(q.fscore);
            row.paths_ok = Some(paths_ok);
        }
        Err(e) => {
            row.status = "error".into();
            row.error = Some(Failure::from(e).message);
        }
    }
    row
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.6}"))
}

/// CSV rendering; `with_time` adds the solve time column.
pub fn rows_csv(rows: &[Row], with_time: bool) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["method", "config", "params", "status", "AN", "FiM", "PrM", "F-score"];
    if with_time {
        header.push("solve_time");
    }
    header.push("paths");
    let csv_err = |e: csv::Error| Failure::internal(format!("csv output: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![
            r.method.clone(),
            r.config.clone(),
            r.params.clone(),
            r.status.clone(),
            r.an.map_or_else(String::new, |a| a.to_string()),
            num(r.fim),
            num(r.prm),
            num(r.fscore),
        ];
        if with_time {
            rec.push(r.solve_time.map_or_else(String::new, |t| format!("{t:.3}")));
        }
        rec.push(r.paths_label().into());
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Failure::internal(format!("csv output: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Failure::internal(e.to_string()))
}

/// Fixed-width text table for the terminal.
pub fn rows_table(rows: &[Row], with_time: bool) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "{:<9} {:<6} {:<28} {:<14} {:>5} {:>8} {:>8} {:>8}",
        "method", "config", "params", "status", "AN", "FiM", "PrM", "F"
    );
    if with_time {
        let _ = write!(out, " {:>9}", "time[s]");
    }
    out.push_str(" paths\n");
    let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"));
    for r in rows {
        let _ = write!(
            out,
            "{:<9} {:<6} {:<28} {:<14} {:>5} {:>8} {:>8} {:>8}",
            r.method,
            r.config,
            r.params,
            r.status,
            r.an.map_or_else(|| "-".to_string(), |a| a.to_string()),
            cell(r.fim),
            cell(r.prm),
            cell(r.fscore)
        );
        if with_time {
            let _ = write!(
                out,
                " {:>9}",
                r.solve_time.map_or_else(|| "-".into(), |t| format!("{t:.3}"))
            );
        }
        let _ = writeln!(out, " {}", r.paths_label());
    }
    out
}

/// Writes `PREFIX.csv` and `PREFIX.json`.
pub fn write_pair(prefix: &Path, csv: &str, json: &impl Serialize) -> CliResult<(PathBuf, PathBuf)> {
    let csv_path = with_suffix(prefix, "csv");
    let json_path = with_suffix(prefix, "json");
    let json = pretty_json(json)?;
    std::fs::write(&csv_path, csv).map_err(|e| Failure::write(&csv_path, e))?;
    std::fs::write(&json_path, json).map_err(|e| Failure::write(&json_path, e))?;
    Ok((csv_path, json_path))
}

pub fn pretty_json(value: &impl Serialize) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::internal(e.to_string()))
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Default `MaxArcsRatio` grid, 2.1 down to 1.1.
pub fn ratio_grid() -> Vec<f64> {
    (0..11).map(|k| (21 - k) as f64 / 10.0).collect()
}

/// Default baseline threshold grid, 0.80 up to 1.00.
pub fn threshold_grid() -> Vec<f64> {
    (0..11).map(|k| (80 + 2 * k) as f64 / 100.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let r = ratio_grid();
        assert_eq!((r.len(), r[0], r[10]), (11, 2.1, 1.1));
        let t = threshold_grid();
        assert_eq!((t.len(), t[0], t[10]), (11, 0.8, 1.0));
    }

    #[test]
    fn failed_rows_render_blank() {
        let mut row = Row::new("ilp", "C1".into(), "MaxArcsRatio=1".into());
        row.status = "infeasible".into();
        let csv = rows_csv(&[row], true).unwrap();
        assert_eq!(csv.lines().nth(1).unwrap(), "ilp,C1,MaxArcsRatio=1,infeasible,,,,,,-");
    }
}
