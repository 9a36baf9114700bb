use thiserror::Error;

/// Errors produced by the regression and pNML routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PnmlError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("feature dimension must be at least 1")]
    EmptyFeatureDimension,

    #[error("{features} feature vectors but {labels} labels")]
    LabelCountMismatch { features: usize, labels: usize },

    #[error("non-finite value {value} at {location}")]
    NonFinite { value: f64, location: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "singular Gram matrix: smallest eigenvalue {smallest:e} is below the rank threshold {threshold:e}; use lambda > 0"
    )]
    SingularGram { smallest: f64, threshold: f64 },

    #[error("Gram matrix is not positive definite (lambda = {lambda})")]
    NotPositiveDefinite { lambda: f64 },

    #[error("recursive update lost positive definiteness of P ({detail}); refit the model in batch")]
    LostDefiniteness { detail: String },

    #[error("index {index} out of range for {len} samples")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("correlation matrix needs at least one training sample")]
    NoSamples,

    #[error("degenerate pNML: uniform improper density (test point is not learnable)")]
    DegenerateDensity,

    #[error("oracle diverges: non-learnable query (h = {h})")]
    OracleDiverges { h: f64 },

    #[error("input {index}: {source}")]
    AtIndex {
        index: usize,
        #[source]
        source: Box<PnmlError>,
    },

    #[error("csv line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, PnmlError>;

impl From<std::io::Error> for PnmlError {
    fn from(err: std::io::Error) -> Self {
        PnmlError::Io(err.to_string())
    }
}
