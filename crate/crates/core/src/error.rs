use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("exponent {exponent} at byte {offset} exceeds the bound ±{bound}")]
    ExponentOverflow {
        offset: usize,
        exponent: i64,
        bound: i32,
    },

    #[error("function is singular at z = {z}")]
    Singular { z: Complex64 },

    #[error("function has a zero at z = {z}")]
    ZeroAtPoint { z: Complex64 },

    #[error("quadrature did not converge: value {value}, error estimate {error_estimate} after {nodes} nodes")]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        nodes: usize,
    },

    #[error("index {raw} on |z| = {radius} is not an integer")]
    Integrality { radius: f64, raw: f64 },

    #[error("zero or pole on the circle |z| = {radius}")]
    OnCircle { radius: f64 },

    #[error("root at z = {z} lies on a boundary circle")]
    BoundaryRoot { z: Complex64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("polynomial root finder did not converge after {iterations} iterations (max residual {max_residual:e})")]
    RootsNotConverged { iterations: usize, max_residual: f64 },
}

impl Error {
    /// Numerical failures as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::Integrality { .. }
                | Error::RootsNotConverged { .. }
        )
    }
}
