use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = ServiceError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown campaign {0:?}")]
    UnknownCampaign(String),
    #[error("campaign {0:?} already exists")]
    CampaignExists(String),
    #[error("unknown annotator {0:?}")]
    UnknownAnnotator(String),
    #[error("item {item:?} is not assigned to {annotator:?}")]
    UnassignedItem { annotator: String, item: String },
    #[error("insufficient pool for model {model:?}, tag {tag}: need {needed}, have {available}")]
    InsufficientPool {
        model: String,
        tag: String,
        needed: usize,
        available: usize,
    },
    #[error("rejected: {}", .0.join("; "))]
    Rejected(Vec<String>),
    #[error("conflicting resubmission for {annotator:?}/{item:?}")]
    Conflict { annotator: String, item: String },
    #[error("missing or invalid bearer token")]
    Unauthorized,
    #[error("token does not grant access to this resource")]
    Forbidden,
    #[error("invalid request: {0}")]
    Invalid(String),
    #[error("{path}: corrupt log at line {line}: {message}")]
    CorruptLog {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Core(#[from] etr_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ServiceError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ServiceError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn is_io(&self) -> bool {
        match self {
            ServiceError::Io { .. } => true,
            ServiceError::Core(e) => e.is_io(),
            _ => false,
        }
    }
}
