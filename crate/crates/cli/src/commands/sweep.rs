use std::path::PathBuf;

use clap::Args;
use optdg_core::{count_relations, dependency_measures, DiscoveryConfig};
use serde::Serialize;
use serde_json::Value;

use crate::failure::{CliResult, Failure};
use crate::options::{InputArgs, ModelArgs, SolverArgs};
use crate::report::{ilp_row, ratio_grid, rows_csv, rows_table, write_pair, Row};

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Parameter to vary, by its configuration file name.
    #[arg(long, default_value = "MaxArcsRatio")]
    pub param: String,
    /// Comma-separated values; defaults to 2.1,2.0,...,1.1 for MaxArcsRatio.
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<f64>,
    /// Output prefix; PREFIX.csv and PREFIX.json are written.
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SweepReport<'a> {
    param: &'a str,
    tasks: usize,
    rows: &'a [Row],
}

/// `cfg` with the field named `name` (as in configuration files) set to `value`.
pub fn with_param(cfg: &DiscoveryConfig, name: &str, value: f64) -> CliResult<DiscoveryConfig> {
    let mut json = serde_json::to_value(cfg).map_err(|e| Failure::internal(e.to_string()))?;
    let fields = json.as_object_mut().expect("config serializes to an object");
    let slot = match fields.get_mut(name) {
        Some(slot) if name != "constraint" => slot,
        _ => {
            let mut known: Vec<&str> = fields
                .keys()
                .map(String::as_str)
                .filter(|k| *k != "constraint")
                .collect();
            known.sort_unstable();
            return Err(Failure::input(format!(
                "unknown parameter {name:?}; expected one of {}",
                known.join(", ")
            )));
        }
    };
    *slot = if slot.is_u64() {
        if value.fract() != 0.0 || value < 0.0 || value > u32::MAX as f64 {
            return Err(Failure::input(format!(
                "{name} needs a non-negative integer, got {value}"
            )));
        }
        Value::from(value as u64)
    } else {
        Value::from(value)
    };
    serde_json::from_value(json).map_err(|e| Failure::input(format!("{name}: {e}")))
}

pub fn run(args: &SweepArgs) -> CliResult<()> {
    let log = args.input.load()?;
    let base = args.model.resolve()?;
    let limits = args.solver.limits()?;
    let options = args.solver.options();
    let values = if !args.values.is_empty() {
        args.values.clone()
    } else if args.param == "MaxArcsRatio" {
        ratio_grid()
    } else {
        return Err(Failure::input(format!(
            "--values is required when sweeping {}",
            args.param
        )));
    };
    let configs = values
        .iter()
        .map(|&v| with_param(&base, &args.param, v))
        .collect::<CliResult<Vec<_>>>()?;

    let meas = dependency_measures(&count_relations(&log));
    let rows: Vec<Row> = configs
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(k, (cfg, v))| {
            let row = ilp_row(
                &log,
                &meas,
                cfg,
                &limits,
                &options,
                format!("C{}", k + 1),
                format!("{}={v}", args.param),
            );
            log::info!("{} {}: {}", row.config, row.params, row.status);
            row
        })
        .collect();

    print!("{}", rows_table(&rows, true));
    if let Some(prefix) = &args.out {
        let report = SweepReport {
            param: &args.param,
            tasks: log.num_tasks(),
            rows: &rows,
        };
        let (csv, json) = write_pair(prefix, &rows_csv(&rows, true)?, &report)?;
        println!("wrote {} and {}", csv.display(), json.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sets_fields_by_file_name() {
        let cfg = with_param(&DiscoveryConfig::default(), "MaxArcsRatio", 1.3).unwrap();
        assert_eq!(cfg.max_arcs_ratio, 1.3);
        let cfg = with_param(&cfg, "MaxInputs", 2.0).unwrap();
        assert_eq!(cfg.max_inputs, 2);
        assert!(with_param(&cfg, "MaxInputs", 2.5).is_err());
        assert_eq!(with_param(&cfg, "Bogus", 1.0).unwrap_err().code, 2);
    }
}
