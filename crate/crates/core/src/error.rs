use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dilogarithm branch cut: Li2 is undefined on the real ray (1, inf), got {0}")]
    BranchCut(String),
    #[error("invalid character: {0}")]
    InvalidCharacter(String),
    #[error("character {0} is even")]
    EvenCharacter(String),
    #[error("character {0} is not primitive")]
    Imprimitive(String),
    #[error("character {0} is principal")]
    Principal(String),
    #[error("-{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("{k} does not divide {d}")]
    NotDivisor { d: u64, k: u64 },
    #[error("unknown basis element {0:?}")]
    UnknownBasis(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("the zero polynomial has no Mahler measure")]
    ZeroPolynomial,
    #[error("root finding did not converge at theta = {theta}")]
    NoConvergence { theta: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
