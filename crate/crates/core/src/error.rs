use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("size mismatch: |{left}| = {left_size} but |{right}| = {right_size}")]
    SizeMismatch {
        left: String,
        left_size: usize,
        right: String,
        right_size: usize,
    },

    #[error("degree {degree} exceeds the configured limit {limit}")]
    DegreeLimit { degree: usize, limit: usize },

    #[error("invalid partition {0:?}: parts must be positive and weakly decreasing")]
    InvalidPartition(Vec<usize>),

    #[error("the transposition class 1^(d-2)2 is undefined for degree {0}")]
    NoTransposition(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("truncation tail bound {bound} exceeds the requested tolerance {tolerance}")]
    PrecisionExhausted { bound: String, tolerance: String },

    #[error("tail majorant diverges: term ratio {ratio} >= 1 at degree {degree}")]
    Divergence { degree: usize, ratio: String },

    #[error("logarithm of a non-positive quantity ({0})")]
    Branch(String),

    #[error("division by a value too close to zero ({0})")]
    NearZero(String),

    #[error("coefficient backend cannot evaluate: {0}")]
    Backend(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("cache i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
