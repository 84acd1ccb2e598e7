//! Command-line workbench for scheduled relaxation: schedule generation,
//! single solves with residual histories, method comparison matrices,
//! invariant verification, and a-priori cost prediction.

mod config;
mod run;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;

/// A failed invocation, split by exit code: configuration and usage
/// problems exit 2, divergence and failed verification exit 1.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Run(String),
}

impl Failure {
    pub fn prefix(self, ctx: &str) -> Failure {
        match self {
            Failure::Config(m) => Failure::Config(format!("{ctx}: {m}")),
            Failure::Run(m) => Failure::Run(format!("{ctx}: {m}")),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "chebjac",
    version,
    about = "Scheduled relaxation workbench for structured-grid elliptic problems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a relaxation schedule and write it as a schedule file.
    Weights(RunArgs),
    /// Run one method on a model problem and record its residual history.
    Solve(RunArgs),
    /// Run several methods on the same problem and tabulate the comparison.
    Bench(RunArgs),
    /// Check a named invariant suite and print measured errors.
    Verify {
        /// One of weights, orderings, bounds, theorems, or all.
        suite: String,
    },
    /// Print the cycle size and contraction bound without solving.
    Predict(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Plain-text `key = value` configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Inline `key=value` override, applied after the file; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Round the cycle size up to the next power of two.
    #[arg(long)]
    round_up_pow2: bool,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Failure::Config(format!("cannot read {}: {e}", path.display()))
                })?;
                ExperimentConfig::from_text(&text)
                    .map_err(|e| e.prefix(&path.display().to_string()))?
            }
            None => ExperimentConfig::default(),
        };
        for pair in &self.set {
            let (key, value) = pair.split_once('=').ok_or_else(|| {
                Failure::Config(format!("--set expects key=value, got {pair:?}"))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        if self.round_up_pow2 {
            cfg.round_up_pow2 = true;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.cmd {
        Cmd::Weights(args) => args.load().and_then(|cfg| run::weights(&cfg)),
        Cmd::Solve(args) => args.load().and_then(|cfg| run::solve(&cfg)),
        Cmd::Bench(args) => args.load().and_then(|cfg| run::bench(&cfg)),
        Cmd::Predict(args) => args.load().and_then(|cfg| run::predict(&cfg)),
        Cmd::Verify { suite } => verify::run(suite),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
    }
}
