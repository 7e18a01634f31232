use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Problems found while reading a run configuration.
#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("`{field}` refers to missing file {}", path.display())]
    MissingFile { field: &'static str, path: PathBuf },
}

impl ConfigError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Self::Invalid {
            field,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Compute(#[from] lscode_core::Error),
    #[error("{0}")]
    Analysis(String),
}

impl CliError {
    /// Process exit status for this error class.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Format { .. } => 5,
            CliError::Compute(_) | CliError::Analysis(_) => 6,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
