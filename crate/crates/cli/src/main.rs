//! `qgraph`: spectra, trace sums and verification reports for a graph-spec file.
//!
//! Exit status: 0 success, 2 input error, 3 solver inconsistency,
//! 4 verification failure.

mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "qgraph",
    version,
    about = "Quantum graph spectra and regularized trace formulas"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues below the level and their per-edge partition.
    Spectrum(RunArgs),
    /// Partial sums of the regularized trace over the allowed-level schedule.
    Trace(RunArgs),
    /// Per-window eigenvalue asymptotics against computed eigenvalues.
    Asymptotics(RunArgs),
    /// Residue table, zero counts, Weyl counts and log-ratio decay checks.
    Verify(RunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Graph-spec JSON file.
    #[arg(long)]
    graph: PathBuf,
    /// Largest wavenumber; the run uses the first allowed level at or above it.
    #[arg(long)]
    kmax: f64,
    /// Relative tolerance of the eigenvalue refinement.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Forbidden-region margin, or `auto` for 0.9 times the admissible bound.
    #[arg(long, default_value = "auto")]
    epsilon: String,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Comma-separated subset of csv, json, svg.
    #[arg(long, default_value = "csv,json,svg", value_delimiter = ',')]
    format: Vec<String>,
}

/// Terminal error with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(args) => commands::Run::new(args).and_then(|r| r.spectrum()),
        Command::Trace(args) => commands::Run::new(args).and_then(|r| r.trace()),
        Command::Asymptotics(args) => commands::Run::new(args).and_then(|r| r.asymptotics()),
        Command::Verify(args) => commands::Run::new(args).and_then(|r| r.verify()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qgraph: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
