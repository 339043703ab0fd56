//! Batch front end for gemination corpora: validation, analysis, synthesis
//! and reporting.

pub mod commands;
pub mod config;
pub mod corpus;

use std::path::Path;

use thiserror::Error;

pub use config::RunConfig;

/// Failure that ends a command. Data errors exit with 1, I/O errors with 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Data(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Clean,
    /// Finished, but the input has problems worth a non-zero exit.
    DataErrors,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Clean => 0,
            Status::DataErrors => 1,
        }
    }
}
