use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;
use optdg_core::log::{generate_synthetic_log, write_xes, GeneratorSpec, RandomSpecParams};

use crate::failure::{CliResult, Failure};
use crate::report::pretty_json;

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Process to simulate, as generator JSON; drawn at random when absent.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Tasks of a random process, including its initial and final task.
    #[arg(long, default_value_t = 10)]
    pub alphabet: usize,
    #[arg(long, default_value_t = 1.0)]
    pub seq_weight: f64,
    #[arg(long, default_value_t = 1.0)]
    pub xor_weight: f64,
    #[arg(long, default_value_t = 1.0)]
    pub and_weight: f64,
    #[arg(long, default_value_t = 0.1)]
    pub loop_prob: f64,
    #[arg(long, default_value_t = 0.3)]
    pub redo_prob: f64,
    #[arg(long, default_value_t = 100)]
    pub traces: usize,
    /// Per-event probability of a swap, skip or duplicate.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Canonical JSON log output.
    #[arg(long, short = 'o')]
    pub out: PathBuf,
    /// Also write the log as XES.
    #[arg(long)]
    pub xes: Option<PathBuf>,
    /// Also write the generator JSON that was simulated.
    #[arg(long)]
    pub spec_out: Option<PathBuf>,
}

pub fn run(args: &SynthArgs) -> CliResult<()> {
    let spec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<GeneratorSpec>(&text)
                .map_err(|e| Failure::input(format!("generator spec {}: {e}", path.display())))?
        }
        None => GeneratorSpec::random(
            &RandomSpecParams {
                alphabet_size: args.alphabet,
                seq_weight: args.seq_weight,
                xor_weight: args.xor_weight,
                and_weight: args.and_weight,
                loop_prob: args.loop_prob,
                redo_prob: args.redo_prob,
            },
            args.seed,
        )?,
    };
    let log = generate_synthetic_log(&spec, args.traces, args.noise, args.seed)?;
    std::fs::write(&args.out, log.to_json()? + "\n").map_err(|e| Failure::write(&args.out, e))?;
    if let Some(path) = &args.xes {
        let file = File::create(path).map_err(|e| Failure::write(path, e))?;
        write_xes(&log, BufWriter::new(file)).map_err(|e| Failure::write(path, e))?;
    }
    if let Some(path) = &args.spec_out {
        std::fs::write(path, pretty_json(&spec)?).map_err(|e| Failure::write(path, e))?;
    }
    println!(
        "{} traces ({} distinct) over {} tasks",
        log.total_traces(),
        log.distinct_traces(),
        log.num_tasks()
    );
    Ok(())
}
