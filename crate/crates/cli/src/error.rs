use std::path::PathBuf;

use etr_service::ServiceError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] etr_core::Error),
    #[error(transparent)]
    Service(#[from] ServiceError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for I/O failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        let io = match self {
            CliError::Io { .. } => true,
            CliError::Core(e) => e.is_io(),
            CliError::Service(e) => e.is_io(),
            CliError::Usage(_) => false,
        };
        if io {
            2
        } else {
            1
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
