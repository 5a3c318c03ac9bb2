use thiserror::Error;

/// Errors produced by the quadrature, solver and boundary-integral layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value while evaluating {what} at x = {x}")]
    NonFinite { what: &'static str, x: f64 },

    #[error("computation failed: {0}")]
    Computation(String),

    /// A kernel or data evaluation produced a non-finite entry of the
    /// collocation system. `node` is the quadrature index, `row` the
    /// collocation index.
    #[error("assembly failed at node {node}, collocation row {row}: {what} is not finite")]
    Assembly {
        what: &'static str,
        node: usize,
        row: usize,
    },

    #[error("singular Jacobian: pivot {pivot:e} in column {column}")]
    SingularJacobian { column: usize, pivot: f64 },

    /// The Newton iteration ran out of budget. `best` is the iterate with
    /// the smallest residual seen.
    #[error("no convergence after {iterations} iterations (best residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        best: Vec<f64>,
    },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
