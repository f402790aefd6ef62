use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("quadrature failed to converge: {0}")]
    Convergence(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
