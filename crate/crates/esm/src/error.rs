use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, EsmError>;

#[derive(Debug, Error)]
pub enum EsmError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("line {line}: feature indices must be strictly increasing")]
    NonMonotoneIndex { line: usize },
    #[error("line {line}: unknown label '{token}'")]
    UnknownLabel { line: usize, token: String },
    #[error("{clusters} clusters per class need {needed} distinct vertices but only 2^{features} exist")]
    TooManyClusters { clusters: usize, features: usize, needed: usize },
    #[error("class {label} has too few points ({count}) for this split")]
    ClassTooSmall { label: i8, count: usize },
    #[error("model file schema {found}, expected {expected}")]
    SchemaMismatch { found: u32, expected: u32 },
    #[error("corrupt model file: {0}")]
    CorruptFile(String),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Core(#[from] esm_core::Error),
    #[error("{0}")]
    InvalidArgument(String),
}

impl EsmError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        EsmError::Io { path: path.into(), source }
    }

    /// True for failures of the optimization itself rather than of the
    /// inputs.
    pub fn is_training_failure(&self) -> bool {
        matches!(
            self,
            EsmError::Core(esm_core::Error::EmptyEllipsoid { .. } | esm_core::Error::SingularF { .. })
        )
    }
}
