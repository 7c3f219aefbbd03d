use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its physical or structural domain.
    #[error("invalid configuration: {field}: {reason}")]
    Config { field: &'static str, reason: String },

    /// Field evaluated at (or within the guard radius of) a point source.
    #[error("field evaluation {distance:e} m from the source is inside the {guard:e} m singularity guard")]
    Singularity { distance: f64, guard: f64 },

    #[error("equilibrium solver did not converge after {iterations} iterations (residual {residual:e})")]
    Solver { iterations: usize, residual: f64 },

    #[error("index {index} out of range for {len} ions")]
    Index { index: usize, len: usize },

    #[error("infeasible: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }
}
