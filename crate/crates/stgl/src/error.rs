//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by graph construction, generation, solving, scoring, and IO.
#[derive(Error, Debug)]
pub enum Error {
    /// A matrix or vector failed a structural validity check.
    #[error("validation failed: {0}")]
    Validation(String),

    /// Operand shapes do not conform.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An iterative method exhausted its iteration budget.
    #[error("{method} did not converge within {iterations} iterations (residual {residual:.3e})")]
    Convergence { method: &'static str, iterations: usize, residual: f64 },

    /// A dense linear-algebra kernel failed (eigendecomposition, SVD, solve).
    #[error("linear algebra failure in {context}: {source}")]
    Linalg {
        context: &'static str,
        #[source]
        source: ndarray_linalg::error::LinalgError,
    },

    /// Non-finite values where finite ones are required.
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    /// Random generation could not satisfy a constraint within its retry budget.
    #[error("generation failed after {attempts} attempts: {reason}")]
    Generation { attempts: usize, reason: String },

    /// Malformed input data (CSV parse errors and the like).
    #[error("data error: {0}")]
    Data(String),

    /// Invalid configuration value.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn linalg(
        context: &'static str,
    ) -> impl FnOnce(ndarray_linalg::error::LinalgError) -> Error {
        move |source| Error::Linalg { context, source }
    }

    pub(crate) fn io(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
        move |source| Error::Io { path: path.display().to_string(), source }
    }
}
