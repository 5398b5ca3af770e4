//! `lnelab run --config <file> [--out <dir>] [--verbose]`
//! `lnelab validate --config <file>`

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use lnelab::runner::{self, ExperimentConfig, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "lnelab", version, about = "Config-driven distance-function and medial-axis experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every experiment of a config and write reports, CSV tables and SVG plots.
    Run {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        /// Output directory, replacing the config's `output_dir`.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        #[arg(long, short)]
        verbose: bool,
    },
    /// Parse and validate a config without running it.
    Validate {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verbose = matches!(cli.command, Command::Run { verbose: true, .. });
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if verbose { "info" } else { "warn" }))
        .format_timestamp(None)
        .init();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Validate { config } => {
            let c = ExperimentConfig::from_path(&config)?;
            println!("{}: ok ({} experiments)", config.display(), c.experiments.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { config, out, .. } => {
            let c = ExperimentConfig::from_path(&config)?;
            let opts = RunOptions::from_env(out)?;
            let outcome = runner::run(&c, &opts).with_context(|| format!("running {}", config.display()))?;
            for e in &outcome.experiments {
                println!(
                    "{:<6} {} ({}): {}/{} checks",
                    if e.passed { "PASS" } else { "FAIL" },
                    e.name,
                    e.kind,
                    e.checks_passed,
                    e.checks_total
                );
            }
            println!("outputs in {}", outcome.output_dir.display());
            Ok(if outcome.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
