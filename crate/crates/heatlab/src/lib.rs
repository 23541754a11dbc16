//! Experiment runner on top of `heatlab-core`: configuration, commands,
//! the estimate-verification suite and the CSV/JSON output formats.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify_suite;

use std::path::Path;

pub use commands::Outcome;
pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] heatlab_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

/// Exit code for invalid input or configuration.
pub const EXIT_INVALID: i32 = 3;

/// Write every artifact of `outcome` into `dir`.
pub fn write_artifacts(outcome: &Outcome, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    for (name, contents) in &outcome.files {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}
