//! Runs a TOML experiment and prints both report formats.
//!
//! cargo run --release --example experiment -- configs/rho090.toml

use std::io::stdout;

use tandem_polling::experiment::{emit_report, run_experiment, ExperimentConfig, Format};

const DEFAULT: &str = r#"
schema = "polling-wait/v1"
cases = [[1, 1, 1, 1], [1, 1, 3, 3], [3, 6, 3, 6]]
modes = ["analytic", "simulate", "deterministic"]

[params]
lambda = [1.0, 1.0]
mu = [[2.86, 2.86], [2.86, 2.86]]

[sim]
replications = 2000
seed = 7
"#;

fn main() -> tandem_polling::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => ExperimentConfig::from_path(path.as_ref())?,
        None => ExperimentConfig::from_toml(DEFAULT)?,
    };
    let (rows, summary) = run_experiment(&cfg)?;
    emit_report(&rows, Format::Table, stdout().lock())?;
    println!();
    emit_report(&rows, Format::Csv, stdout().lock())?;
    if let (Some(mean), Some(share)) = (summary.mean_error_pct, summary.share_below_9) {
        println!("\nmean error {mean:.2}%, {:.0}% below 9%", share * 100.0);
    }
    Ok(())
}
