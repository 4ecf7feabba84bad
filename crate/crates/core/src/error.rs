use thiserror::Error;

/// Errors raised by the estimation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("numerical singularity: {0}")]
    Singular(String),

    #[error("baseline precondition violated: fixed-point factor {value:e} for component {index}")]
    NegativeFactor { index: usize, value: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: f64,
        /// Last iterate reached before giving up.
        last: Vec<f64>,
    },

    #[error("degenerate degree grid: {0}")]
    DegenerateGrid(String),

    #[error("coefficient {0} is not identifiable from the data")]
    Unidentifiable(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
