use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("component {index} evaluated to a non-finite value ({value})")]
    NonFiniteComponent { index: usize, value: f64 },

    #[error("unsupported capability: {0}")]
    UnsupportedCapability(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The optimizer produced a non-finite gradient. Carries the offending
    /// iterate so callers can inspect where it blew up.
    #[error("divergence at iteration {iteration}: non-finite gradient")]
    Divergence { iteration: usize, iterate: Vec<f64> },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("empty input")]
    EmptyInput,

    #[error(
        "unsupported dimension {dim} (exact solver handles at most {max}); use the core-set baseline as reference"
    )]
    UnsupportedDimension { dim: usize, max: usize },

    #[error("parse error at line {line}{}: {message}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        line: usize,
        column: Option<usize>,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
