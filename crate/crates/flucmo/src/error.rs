use std::path::PathBuf;

/// Errors surfaced by the CLI; every variant maps to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("cap exceeded: {0}")]
    Cap(flucmo_core::Error),
    #[error("invalid input: {0}")]
    Core(flucmo_core::Error),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl From<flucmo_core::Error> for CliError {
    fn from(e: flucmo_core::Error) -> Self {
        match e {
            flucmo_core::Error::CapExceeded { .. } => CliError::Cap(e),
            other => CliError::Core(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
