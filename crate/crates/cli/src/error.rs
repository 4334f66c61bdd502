use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes. These values are a stable contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    ConfigError = 1,
    Unstable = 2,
    NumericalFailure = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("malformed configuration: {0}")]
    Parse(String),

    #[error("unknown configuration keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] magnon_core::Error),
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        use magnon_core::Error as E;
        match self {
            CliError::Core(E::Unstable { .. }) | CliError::Core(E::EmptyResult) => ExitStatus::Unstable,
            CliError::Core(E::Numerical(_)) | CliError::Core(E::UnphysicalState(_)) => ExitStatus::NumericalFailure,
            _ => ExitStatus::ConfigError,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
