//! Library side of the `qenergy` command: argument and config handling,
//! CSV rendering for each subcommand, and the validation registry.

pub mod config;
pub mod output;
pub mod spin;
pub mod sweep;
pub mod toy;
pub mod validate;

use std::fs;
use std::path::Path;

use config::{Cli, Command};

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status when the validation suite (or a run-time check) fails.
pub const EXIT_FAILED: i32 = 1;
/// Exit status for unusable configuration.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Failed(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => EXIT_FAILED,
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
        }
    }

    pub(crate) fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    pub(crate) fn failed(e: impl std::fmt::Display) -> Self {
        CliError::Failed(e.to_string())
    }
}

/// Runs one parsed command line and writes its output. A validation run that
/// completes with failures still writes its report before returning
/// [`CliError::Failed`].
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Toy(args) => {
            let args = args.resolve()?;
            let out = args.output.clone();
            emit(out.as_deref(), &toy::render(&args.settings()?)?)
        }
        Command::Spin(args) => {
            let args = args.resolve()?;
            let out = args.output.clone();
            emit(out.as_deref(), &spin::render(&args.settings()?)?)
        }
        Command::Sweep(args) => {
            let args = args.resolve()?;
            let out = args.output.clone();
            emit(out.as_deref(), &sweep::render(&args.settings()?)?)
        }
        Command::Validate(args) => {
            let args = args.resolve()?;
            let report = validate::run(args.filter.as_deref(), &args.faults());
            if report.is_empty() {
                return Err(CliError::Config(format!(
                    "filter {:?} matches no criterion",
                    args.filter.unwrap_or_default()
                )));
            }
            emit(args.output.as_deref(), &report.render())?;
            match report.failures().first() {
                None => Ok(()),
                Some(_) => Err(CliError::Failed(format!(
                    "failing criteria: {}",
                    report.failures().join(", ")
                ))),
            }
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(CliError::from),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush().map_err(CliError::from)
        }
    }
}
