use thiserror::Error;

/// Errors raised by the spectral operators and the identification pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("band configuration: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("unwrap resolution lost at index {index}: adjacent phase step {step:.6} rad")]
    UnwrapResolution { index: usize, step: f64 },
    #[error("branch integers are not constant: {0}")]
    InconsistentBranch(String),
    #[error("semistability violated: N = {n} but 2M = {twice_m}")]
    SemistabilityViolation { n: i64, twice_m: i64 },
    #[error("degenerate symbol: {0}")]
    DegenerateSymbol(String),
    #[error("inconsistent semistability pair: {0}")]
    InconsistentPair(String),
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
            _ => Error::Parse(e.to_string()),
        }
    }
}
