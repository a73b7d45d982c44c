//! `enorm`: energy-constrained norms, frontiers and bounds from the command line.
//!
//! Exit codes: 0 ok, 2 configuration or input file problem, 3 verification
//! mismatch, 4 numerical convergence failure, 5 invariant violated by inputs.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;
mod plot;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use enorm_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}", path = .0.display(), source = .1)]
    Io(PathBuf, std::io::Error),
    #[error("{path}: {msg}", path = .0.display(), msg = .1)]
    Parse(PathBuf, String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

fn core_code(e: &CoreError) -> u8 {
    match e {
        CoreError::AtEnergy { source, .. } => core_code(source),
        CoreError::InfeasibleEnergy { .. }
        | CoreError::BadGrid
        | CoreError::InvalidParameter(_)
        | CoreError::ResourceLimit { .. } => 2,
        CoreError::Convergence { .. }
        | CoreError::Divergent { .. }
        | CoreError::DualityGap { .. }
        | CoreError::Eigen
        | CoreError::CurveInvariant { .. }
        | CoreError::Concavity(..)
        | CoreError::Sampling(_) => 4,
        _ => 5,
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(..) | CliError::Parse(..) => 2,
            CliError::Verify(_) => 3,
            CliError::Core(e) => core_code(e),
        }
    }
}

#[derive(Parser)]
#[command(name = "enorm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// ‖A‖_E^G at each grid energy, optionally cross-checked by the oracle.
    Enorm(commands::EnormArgs),
    /// Validated E-norm curve with ratio column.
    Curve(commands::CurveArgs),
    /// √G-bound from a truncation ladder (q, p, N) or a fixed matrix.
    Gbound(commands::GboundArgs),
    /// Coefficient frontier Γ and membership of candidate (a, b) pairs.
    Gamma(commands::GammaArgs),
    /// Energy amplification Y_Φ(E) of a Kraus map.
    Channel(commands::ChannelArgs),
    /// Monte-Carlo check of the tensor-extension inequality.
    Extension(commands::ExtensionArgs),
    /// Static SVG charts from CSV outputs.
    Plot(commands::PlotArgs),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("ENORM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "ENORM_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Enorm(a) => commands::enorm(a),
        Command::Curve(a) => commands::curve(a),
        Command::Gbound(a) => commands::gbound(a),
        Command::Gamma(a) => commands::gamma(a),
        Command::Channel(a) => commands::channel(a),
        Command::Extension(a) => commands::extension(a),
        Command::Plot(a) => commands::plot(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
