use std::path::PathBuf;

/// Errors produced by the clustering engine, metrics and loaders.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteFeature { row: usize, col: usize },

    #[error("row {row} has zero variance; correlation dissimilarity is undefined")]
    ZeroVarianceRow { row: usize },

    #[error("column {col} is constant; cannot scale to unit standard deviation")]
    ConstantColumn { col: usize },

    #[error("item {item} is not a member of the group")]
    NotAMember { item: usize },

    #[error("group is empty")]
    EmptyGroup,

    #[error("centroid linkage on feature means requires a feature matrix")]
    MissingFeatures,

    #[error("k = {k} is outside [1, {n}]")]
    KOutOfRange { k: usize, n: usize },

    #[error("label vector has length {got}, expected {expected}")]
    LabelLength { expected: usize, got: usize },

    #[error("non-finite linkage value {value} between groups led by items {left} and {right}")]
    NonFiniteLinkage { left: usize, right: usize, value: f64 },

    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },

    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        column: String,
        message: String,
    },

    #[error("descriptor error: {0}")]
    Descriptor(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Errors caused by the numbers themselves rather than by malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonFiniteLinkage { .. } | Error::ZeroVarianceRow { .. } | Error::ConstantColumn { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
