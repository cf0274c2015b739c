//! billiard-prop: configuration-driven runs of the billiard-core library.
//!
//! Usage: `billiard-prop <scenario> --config <path> [--out <dir>] [--verbose]`
//! with scenarios eigen, evolve, covariance, greens-check, and domain. Exit
//! codes: 0 success, 2 config parse error, 3 validation error, 4 series
//! non-convergence or overflow, 5 quadrature failure, 6 I/O error. Failures
//! print one machine-readable line to stderr:
//! `error kind=<kind> exit=<code> msg=<quoted message>`.

mod config;
mod scenarios;

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};

use config::ScenarioKind;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] billiard_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => 2,
            CliError::Validation(_) => 3,
            CliError::Core(billiard_core::Error::InvalidInput(_)) => 3,
            CliError::Core(
                billiard_core::Error::NonConvergent { .. } | billiard_core::Error::Overflow { .. },
            ) => 4,
            CliError::Core(billiard_core::Error::Quadrature { .. }) => 5,
            CliError::Io(_) => 6,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Validation(_) => "validation",
            CliError::Core(billiard_core::Error::InvalidInput(_)) => "validation",
            CliError::Core(
                billiard_core::Error::NonConvergent { .. } | billiard_core::Error::Overflow { .. },
            ) => "series",
            CliError::Core(billiard_core::Error::Quadrature { .. }) => "quadrature",
            CliError::Io(_) => "io",
        }
    }
}

#[derive(Parser)]
#[command(
    name = "billiard-prop",
    about = "Exact billiard eigenstates, theta-kernel propagation, and covariance traces",
    version
)]
struct Cli {
    #[command(subcommand)]
    scenario: ScenarioCmd,
    /// Path to the key = value configuration document.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory receiving the output files (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Print per-step progress.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum ScenarioCmd {
    /// Dump the configured state on a lattice and report mode energies.
    Eigen,
    /// Propagate the configured state and dump a lattice snapshot per time.
    Evolve,
    /// Trace Cov(Xc, x, t) over the time grid.
    Covariance,
    /// Compare the theta-form kernel against the spectral oracle.
    GreensCheck,
    /// Dump domain polygon vertices.
    Domain,
}

impl ScenarioCmd {
    fn kind(&self) -> ScenarioKind {
        match self {
            ScenarioCmd::Eigen => ScenarioKind::Eigen,
            ScenarioCmd::Evolve => ScenarioKind::Evolve,
            ScenarioCmd::Covariance => ScenarioKind::Covariance,
            ScenarioCmd::GreensCheck => ScenarioKind::GreensCheck,
            ScenarioCmd::Domain => ScenarioKind::Domain,
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let Some(config_path) = &cli.config else {
        return Err(CliError::Parse {
            line: 0,
            msg: "--config <path> is required".into(),
        });
    };
    let text = fs::read_to_string(config_path)?;
    let sha = format!("{:x}", Sha256::digest(text.as_bytes()));
    let cfg = config::parse_config(&text, cli.scenario.kind())?;
    fs::create_dir_all(&cli.out)?;
    let ctx = scenarios::RunContext {
        cfg: &cfg,
        out_dir: &cli.out,
        config_sha256: &sha,
        verbose: cli.verbose,
    };
    scenarios::run(&ctx)
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error kind={} exit={} msg={:?}", e.kind(), e.exit_code(), e.to_string());
        std::process::exit(e.exit_code());
    }
}
