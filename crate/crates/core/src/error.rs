use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported p = {0} for this operation")]
    UnsupportedP(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("malformed tube vector: {0}")]
    MalformedTube(String),

    #[error("index set is not a subset: element {0:?} missing from superset")]
    NotASubset(Vec<u32>),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("singular triangular system at row {0}")]
    Singular(usize),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("index set too large for this operation: {size} > {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("model `{model}` failed at {point}: {reason}")]
    ModelEval {
        model: String,
        point: String,
        reason: String,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
