use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("CFL violation: cfl = {cfl:.4} exceeds target {target}; advisory dt = {advisory_dt:.3e}")]
    CflViolation {
        cfl: f64,
        target: f64,
        advisory_dt: f64,
    },

    #[error("non-finite state at t = {0}")]
    NonFinite(f64),

    #[error("unresolved: {0}")]
    Unresolved(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("wrong branch: {0}")]
    WrongBranch(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("reference rejected: {0}")]
    ReferenceRejected(String),

    #[error("config error at line {line}, column {column}: {message}")]
    ConfigParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("config validation: {0}")]
    ConfigInvalid(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
