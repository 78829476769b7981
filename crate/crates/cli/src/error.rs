//! CLI error type carrying the process exit code: 2 for configuration and
//! validation problems, 3 for runtime numerical or I/O failures.

use std::io;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unreadable or invalid configuration; exit code 2.
    #[error("{0}")]
    Config(String),
    /// Numerical failure after validation passed; exit code 3.
    #[error("{0}")]
    Compute(String),
    /// Artifact I/O failure; exit code 3.
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 3,
        }
    }

    pub fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn compute(e: impl std::fmt::Display) -> Self {
        CliError::Compute(e.to_string())
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
