use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse grouping used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad arguments or configuration values.
    Usage,
    /// Filesystem failures.
    Io,
    /// Divergence, division by zero, non-finite values.
    Numeric,
    /// Malformed CSV/model files or mismatched shapes.
    Schema,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("shape mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("division by zero: desired value is 0 at exemplar {exemplar}, element {element}")]
    DivisionByZero { exemplar: usize, element: usize },

    #[error("training diverged at epoch {epoch} (learning rate {learning_rate}): non-finite loss")]
    Divergence { epoch: usize, learning_rate: f64 },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("column `{0}` is constant; cannot fit min-max normalization")]
    ConstantColumn(&'static str),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV header mismatch: expected `{expected}`, found `{found}`")]
    CsvHeader { expected: String, found: String },

    #[error("row {row}, column `{column}`: {message}")]
    CsvCell {
        row: usize,
        column: String,
        message: String,
    },

    #[error("row {row}: {message}")]
    CsvRow { row: usize, message: String },

    #[error("model file line {line}: {message}")]
    ModelFormat { line: usize, message: String },

    #[error("all {0} candidates failed to train")]
    AllCandidatesFailed(usize),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidConfig(_) => ErrorKind::Usage,
            Error::Io { .. } => ErrorKind::Io,
            Error::DivisionByZero { .. }
            | Error::Divergence { .. }
            | Error::ConstantColumn(_)
            | Error::AllCandidatesFailed(_) => ErrorKind::Numeric,
            Error::DimensionMismatch { .. }
            | Error::ShapeMismatch { .. }
            | Error::EmptyDataset
            | Error::CsvHeader { .. }
            | Error::CsvCell { .. }
            | Error::CsvRow { .. }
            | Error::ModelFormat { .. } => ErrorKind::Schema,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
