use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tandem_polling::experiment::{emit_report, run_experiment, ExperimentConfig, Format, Mode};

/// Conditional waiting times in a two-station tandem polling network.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// Experiment description (TOML).
    #[arg(short, long)]
    config: PathBuf,
    /// Write the report here instead of the config's `output` or stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Replace the config's modes (comma separated).
    #[arg(long, value_delimiter = ',')]
    mode: Option<Vec<Mode>>,
    /// Replace the simulation seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    format: Option<Format>,
}

fn run(args: Args) -> tandem_polling::Result<bool> {
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    if let Some(m) = args.mode {
        cfg.modes = m;
    }
    if let Some(s) = args.seed {
        cfg.sim.seed = s;
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    if let Some(o) = args.output {
        cfg.output = Some(o);
    }
    let (rows, summary) = run_experiment(&cfg)?;
    match &cfg.output {
        Some(path) => emit_report(&rows, cfg.format, BufWriter::new(File::create(path)?))?,
        None => emit_report(&rows, cfg.format, io::stdout().lock())?,
    }
    let mut err = io::stderr().lock();
    if let (Some(mean), Some(share)) = (summary.mean_error_pct, summary.share_below_9) {
        let _ = writeln!(
            err,
            "mean error {mean:.2}%, {:.0}% of rows below 9%",
            share * 100.0
        );
    }
    for r in rows.iter().filter(|r| r.failed()) {
        let _ = writeln!(
            err,
            "{} {}: {}",
            r.la,
            r.m,
            r.failure.as_deref().unwrap_or("")
        );
    }
    Ok(summary.failed == 0)
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
