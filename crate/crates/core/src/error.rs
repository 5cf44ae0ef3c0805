use thiserror::Error;

/// Errors raised by the analysis and solver routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no sign change of the {kind} characteristic function on ({lo}, {hi}) for q = {q}, k = {k}")]
    NoSignChange {
        kind: &'static str,
        q: f64,
        k: usize,
        lo: f64,
        hi: f64,
    },

    #[error("grid not aligned with interfaces: {0}")]
    GridAlignment(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("insufficient history: need {needed} positive entries, have {available}")]
    InsufficientHistory { needed: usize, available: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
