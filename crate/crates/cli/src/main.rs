use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rnmod_cli::report::Report;
use rnmod_cli::run::{self, DEFAULT_NET_EPS, DEFAULT_NET_SAMPLES};

/// Fixed points in random normed modules over finite probability spaces.
#[derive(Parser)]
#[command(name = "rnmod", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and check its residual bound.
    Run {
        scenario: PathBuf,
        /// Report file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare the direct solve with the per-atom classical pipeline.
    Oracle {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Build and sample a random epsilon-net of the scenario's set.
    Net {
        scenario: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NET_EPS, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, default_value_t = DEFAULT_NET_SAMPLES)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn emit(report: &Report, out: Option<&Path>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, out) = match cli.command {
        Command::Run { scenario, out, seed } => (run::run(&scenario, seed), out),
        Command::Oracle { scenario, out, seed } => (run::oracle(&scenario, seed), out),
        Command::Net { scenario, eps, samples, out, seed } => (run::net(&scenario, eps, samples, seed), out),
    };
    if let Some(e) = &report.error {
        eprintln!("rnmod: {e}");
    }
    if let Err(e) = emit(&report, out.as_deref()) {
        eprintln!("rnmod: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.exit_code() as u8)
}
