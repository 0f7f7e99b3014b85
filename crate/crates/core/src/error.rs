use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate value at positions {first} and {second}")]
    DuplicateValue { first: usize, second: usize },

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("sequence of length {0} is too short")]
    TooShort(usize),

    #[error("n = {n} exceeds the limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("not a permutation: {0}")]
    InvalidPattern(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("empty fitting window")]
    EmptyWindow,

    #[error("not enough counts: need n up to {needed}, table ends at {available}")]
    MissingCounts { needed: usize, available: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("no single dominant eigenvalue (estimate oscillates or stagnates away from an eigenpair)")]
    NotDominated,

    #[error("operator annihilated the iterate")]
    DegenerateOperator,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument {0} outside the supported range")]
    OutOfRange(f64),

    #[error("Newton iteration did not converge after {0} steps")]
    NoConvergence(usize),

    #[error("{0} is not an odd positive integer")]
    NotOdd(i64),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("graph has no cycles, period undefined")]
    NoCycles,

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
