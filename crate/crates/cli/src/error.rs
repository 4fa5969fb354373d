//! CLI error type with the process exit-code mapping.
//!
//! Exit codes: 0 success, 1 runtime failure (IO, missing files), 2
//! validation failure (malformed inputs, inconsistent configs), 3
//! completed with a warning (currently only an empty class intersection).

use std::path::Path;

/// Exit code for runs that succeed but produced a warning.
pub const EXIT_WARNING: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Inputs or configuration failed validation.
    #[error("{0}")]
    Validation(String),
    /// The environment failed underneath a valid request.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        CliError::Validation(message.into())
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError::Runtime(message.into())
    }

    /// Attaches the file path to an IO error.
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Runtime(format!("{}: {err}", path.display()))
    }

    /// Attaches the file path to a parse error.
    pub fn parse(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("{}: {err}", path.display()))
    }
}

impl From<zsac_core::Error> for CliError {
    fn from(err: zsac_core::Error) -> Self {
        CliError::Validation(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
