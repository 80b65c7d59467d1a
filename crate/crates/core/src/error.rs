use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the function's domain.
    #[error("{name} = {value} is outside the domain of {routine}")]
    Domain {
        /// Function that rejected the argument.
        routine: &'static str,
        /// Argument name.
        name: &'static str,
        /// Offending value.
        value: f64,
    },
    /// The density or function has a pole at the requested point.
    #[error("{routine} is singular at {name} = {value}")]
    Singularity {
        /// Function with the pole.
        routine: &'static str,
        /// Argument name.
        name: &'static str,
        /// Location of the pole.
        value: f64,
    },
    /// An invalid model or configuration parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    /// An iterative method did not converge.
    #[error("{routine} did not converge after {iterations} iterations (last error estimate {estimate:e})")]
    NoConvergence {
        /// Failing method.
        routine: &'static str,
        /// Iterations (or subdivisions) spent.
        iterations: usize,
        /// Last error or bracket estimate.
        estimate: f64,
    },
    /// The Monte Carlo sample set is too small to resolve the target.
    #[error("Monte Carlo stderr {stderr:e} exceeds the allowed {limit:e}; increase the sample count")]
    StatisticalResolution {
        /// Achieved standard error.
        stderr: f64,
        /// Largest standard error the caller accepts.
        limit: f64,
    },
}

/// Shorthand used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
