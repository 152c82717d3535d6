use thiserror::Error;

/// Errors produced by grid construction, quadrature, weight algebra and the
/// condition checkers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("integrand is not integrable at 0 (declared exponent {exponent} <= -1)")]
    NonIntegrableAtZero { exponent: f64 },

    #[error("integrand is not integrable at infinity (declared exponent {exponent} >= -1)")]
    NonIntegrableAtInfinity { exponent: f64 },

    #[error("integrand evaluated to a non-finite value at t = {t}")]
    NonFinite { t: f64 },

    #[error("tail integral diverges: {0}")]
    NonIntegrableTail(String),

    #[error("admissibility hypothesis violated: {0}")]
    AdmissibilityFailed(String),

    #[error(
        "kernel violates the growth condition K(x,y) <= D[K(x,z)+K(z,y)] \
         at (y,z,x) = ({y}, {z}, {x}), ratio {ratio}"
    )]
    GrowthConditionViolated { x: f64, y: f64, z: f64, ratio: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
