//! Command-line front end: reads a JSON run configuration, runs one of the
//! studies and writes CSV/JSON (and optionally SVG) results.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 numerical
//! non-convergence, 3 discrete/continuum mismatch.

pub mod commands;
pub mod config;
pub mod svg;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use commands::{CommandOutput, Outcome};
pub use config::{CommandKind, ConfigError, LoadedConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Model(#[from] oscbath::Error),

    #[error("{0}")]
    Usage(String),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        1
    }
}

#[derive(Debug, Parser)]
#[command(name = "oscbath", version, about = "Stationary energies of two coupled oscillators in separate heat baths")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mean energies u1, u2 and u_int as JSON
    Energy(RunArgs),
    /// Spectral power density of the interaction energy as CSV
    Spectrum(RunArgs),
    /// Energies along a coupling axis (lambda/lambda0) as CSV
    SweepCoupling(RunArgs),
    /// Energies along a frequency-ratio axis (omega02/omega01) as CSV
    SweepRatio(RunArgs),
    /// Compare the continuum energies with finite-bath sums
    ValidateOracle(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON run configuration
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (created if missing)
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Also write an SVG plot next to the CSV
    #[arg(long)]
    pub svg: bool,
    /// Relative quadrature tolerance, overriding the config
    #[arg(long)]
    pub tol: Option<f64>,
}

impl Command {
    pub fn parts(&self) -> (CommandKind, &RunArgs) {
        match self {
            Command::Energy(a) => (CommandKind::Energy, a),
            Command::Spectrum(a) => (CommandKind::Spectrum, a),
            Command::SweepCoupling(a) => (CommandKind::SweepCoupling, a),
            Command::SweepRatio(a) => (CommandKind::SweepRatio, a),
            Command::ValidateOracle(a) => (CommandKind::ValidateOracle, a),
        }
    }
}

/// Writes every artifact into `dir`, creating it first.
pub fn write_outputs(dir: &Path, output: &CommandOutput) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    output
        .artifacts
        .iter()
        .map(|a| {
            let path = dir.join(&a.file_name);
            std::fs::write(&path, &a.contents).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            Ok(path)
        })
        .collect()
}

/// Runs one command end to end and returns its outcome; diagnostics go to
/// stderr, the summary to stdout.
pub fn run(command: &Command) -> Result<Outcome, CliError> {
    let (kind, args) = command.parts();
    let config = LoadedConfig::read(&args.config)?;
    let prepared = commands::Prepared::new(kind, config, args.tol, args.svg)?;
    for w in &prepared.warnings {
        eprintln!("warning: {w}");
    }
    let output = prepared.run()?;
    let written = write_outputs(&args.out, &output)?;
    print!("{}", output.summary);
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(output.outcome)
}
