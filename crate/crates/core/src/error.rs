use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{function}: argument {value} outside domain ({expected})")]
    Domain {
        function: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("state index {index} out of range for {count} bound states")]
    Index { index: usize, count: usize },

    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{0} is undefined: the bath carries no correlation weight")]
    ZeroCorrelation(&'static str),

    #[error("time grids do not match: {0}")]
    GridMismatch(String),

    #[error("dense Hilbert space of dimension {dimension} exceeds the limit of {limit}")]
    DimensionGuard { dimension: usize, limit: usize },

    #[error("quadrature did not converge: estimated error {error:e} after {intervals} intervals")]
    Quadrature { error: f64, intervals: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
