//! `qra`: run one experiment, write its CSV/JSON outputs, and exit 0 when
//! every invariant check passed, 2 when one failed, 1 on operational errors.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use qra_core::config::ExperimentConfig;
use qra_core::experiments::{run_command, COMMANDS};

#[derive(Parser, Debug)]
#[command(
    name = "qra",
    about = "Quantum remote attestation experiment lab",
    long_about = None,
    after_help = command_list()
)]
struct Cli {
    /// Experiment to run.
    command: String,

    /// Flat TOML config; unknown keys are rejected.
    #[arg(long)]
    config: PathBuf,

    /// Master seed; the run is bit-reproducible given (config, seed).
    #[arg(long)]
    seed: u64,

    /// Output directory for rows CSV, curve CSVs, and the JSON summary.
    #[arg(long)]
    out: PathBuf,

    /// Override the trial count from the config file.
    #[arg(long)]
    trials: Option<u64>,
}

fn command_list() -> String {
    format!("commands: {}", COMMANDS.join(", "))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(passed) => {
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let cfg = ExperimentConfig::load(&cli.config)
        .with_context(|| format!("loading {}", cli.config.display()))?;
    let report = run_command(&cli.command, &cfg, cli.seed, cli.trials)
        .with_context(|| format!("running {}", cli.command))?;
    let files = report
        .write(&cli.out)
        .with_context(|| format!("writing results to {}", cli.out.display()))?;

    for check in &report.checks {
        println!(
            "{} {}: {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        );
    }
    for f in &files {
        println!("wrote {}", f.display());
    }
    let passed = report.all_passed();
    println!(
        "{}: {} rows, {} checks, seed {}",
        if passed { "ok" } else { "invariant violation" },
        report.rows.len(),
        report.checks.len(),
        cli.seed
    );
    Ok(passed)
}
