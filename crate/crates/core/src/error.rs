use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty text")]
    EmptyText,
    #[error("empty target")]
    EmptyTarget,
    #[error("empty source")]
    EmptySource,
    #[error("no references")]
    NoReferences,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate embedding")]
    DegenerateEmbedding,
    #[error("undefined harmonic mean: every input must be > 0, got {0:?}")]
    UndefinedHarmonicMean([f64; 3]),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the filesystem rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
