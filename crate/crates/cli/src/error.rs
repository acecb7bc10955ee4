use std::path::PathBuf;

use thiserror::Error;

/// Errors of the command-line layer, each mapped to a stable exit code.
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
    #[error("{path}: malformed JSON: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] snapkit::Error),
    #[error("CSV output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 1 validation failure, 2 precondition failure, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        use snapkit::Error as E;
        match self {
            CliError::Core(E::Precondition(_) | E::StrainModel(_) | E::NotIsostatic(_)) | CliError::Usage(_) => 2,
            CliError::Core(E::Numeric(_)) | CliError::Csv(_) | CliError::Write { .. } => 3,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
