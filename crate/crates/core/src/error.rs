use thiserror::Error;

/// Errors produced by the RCSM kernels, detectors and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not positive definite (failed at pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("singular rank-1 update: denominator {denominator:e} is below the guard")]
    SingularUpdate { denominator: f64 },

    /// CAVI failure with the 1-based antenna and iteration where it happened.
    #[error("CAVI failed at antenna {antenna}, iteration {iteration}: {reason}")]
    Cavi {
        antenna: usize,
        iteration: usize,
        reason: String,
    },

    #[error("{what}: {count} candidates exceed the cap of {cap}")]
    Capacity { what: &'static str, count: u128, cap: u128 },

    #[error("outside the domain: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
