use radbif_core::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const IO: i32 = 1;
    pub const GOLDEN_MISMATCH: i32 = 2;
    pub const SOLVER_FAILURE: i32 = 3;
    pub const PRECONDITION: i32 = 4;
    pub const USAGE: i32 = 64;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("golden mismatch: {0}")]
    Golden(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A run that stopped part way; partial results were written.
    #[error("incomplete run, partial results in {path}: {reason}")]
    Incomplete { path: String, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed cache file {path}: {reason}")]
    Cache { path: String, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Golden(_) => exit::GOLDEN_MISMATCH,
            CliError::Core(CoreError::Precondition(_)) | CliError::Precondition(_) => {
                exit::PRECONDITION
            }
            CliError::Core(_) | CliError::Incomplete { .. } => exit::SOLVER_FAILURE,
            CliError::Io { .. } | CliError::Cache { .. } => exit::IO,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
