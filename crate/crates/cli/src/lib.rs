//! Scenario runner for susylab: JSON configs in, JSON reports and CSV
//! curves out.

use std::path::{Path, PathBuf};

pub mod config;
pub mod report;
pub mod scenario;

pub use config::ScenarioConfig;
pub use report::Report;
pub use scenario::{run_scenario, Outcome, RunOptions, Stage};

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VERDICT_FAILURE: i32 = 1;
    pub const CONFIG_ERROR: i32 = 2;
    pub const NUMERICAL_FAILURE: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] susylab::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_owned(),
            source,
        }
    }

    pub fn csv(path: &Path, source: csv::Error) -> Self {
        CliError::Csv {
            path: path.to_owned(),
            source,
        }
    }

    /// Numerical failures map to 3; bad input and unwritable outputs to 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => exit::NUMERICAL_FAILURE,
            _ => exit::CONFIG_ERROR,
        }
    }
}
