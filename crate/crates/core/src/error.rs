use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Material constants violate strong ellipticity.
    #[error("ellipticity violated: {0}")]
    Ellipticity(&'static str),

    /// The operation has no meaning for this inclusion shape.
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    /// The root finder was given an interval without a sign change.
    #[error("no bracket: f({lo}) and f({hi}) have the same sign")]
    NoBracket { lo: f64, hi: f64 },

    /// An iterative method hit its iteration cap.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// The gap profile is in the wrong mode for the requested operation.
    #[error("gap profile mode: {0}")]
    Mode(&'static str),

    /// The mesh does not resolve the gap.
    #[error("resolution: {0}")]
    Resolution(String),

    /// Requested value lies outside the admissible range.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// No sample point was available.
    #[error("empty sample: {0}")]
    EmptySample(&'static str),

    /// Adaptive quadrature did not reach its tolerance.
    #[error("quadrature tolerance not met (estimated error {estimate:e})")]
    Quadrature { estimate: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
