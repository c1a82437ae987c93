use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("size guard: {0}")]
    TooLarge(String),
    #[error("expected total mass {expected}, got {actual}")]
    WrongMass { expected: usize, actual: usize },
    #[error("expected an element of degree {expected}")]
    WrongDegree { expected: usize },
    #[error("invalid probabilities: {0}")]
    InvalidProbability(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("cone index sets overlap")]
    Overlap,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
