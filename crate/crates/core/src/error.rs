use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("substitution is cyclic: `{0}` is bound to an expression that mentions a bound name")]
    CyclicBinding(String),

    #[error("missing value for parameter `{0}`")]
    MissingValue(String),

    #[error("matrix contains parametric entries; rank is undefined over the rationals")]
    ParametricRank,

    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown basis element `{0}`")]
    UnknownBasis(String),

    #[error("parity mismatch: {0}")]
    ParityMismatch(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("operation requires a {expected} algebra")]
    WrongKind { expected: &'static str },

    #[error("algebra is not nilpotent: {0}")]
    NotNilpotent(String),

    #[error("algebra has parametric structure constants; instantiate parameters first")]
    Parametric,

    #[error("not graded: {0}")]
    NotGraded(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("normalization move not applicable: {0}")]
    InapplicableMove(String),

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
