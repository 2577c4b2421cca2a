//! Experiment runner for `nonsep-core`: configs in, run records out.

pub mod config;
pub mod experiments;
pub mod record;
pub mod summary;

use std::path::Path;

pub use config::{ExperimentConfig, ExperimentKind, OutputFormat, Tolerances};
pub use experiments::run;
pub use record::{RunRecord, TrialResult};
pub use summary::summarize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<nonsep_core::Error> for CliError {
    fn from(e: nonsep_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
