use thiserror::Error;

/// Crate-wide error type. Numeric kernels return `ShapeMismatch`/`Domain`
/// for malformed inputs; `Contract` covers everything that is a misuse of
/// an API rather than bad data (empty batches, non-scalar backward roots).
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: Vec<usize>,
        right: Vec<usize>,
    },

    #[error("{op}: invalid value {value} at index {index}")]
    Domain {
        op: &'static str,
        index: usize,
        value: f64,
    },

    #[error("{0}")]
    Contract(String),

    #[error("no convergence after {iters} iterations (residual {residual:.3e})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience constructor for `Error::Contract` with formatted text.
macro_rules! contract_err {
    ($($arg:tt)*) => {
        $crate::error::Error::Contract(format!($($arg)*))
    };
}
pub(crate) use contract_err;

pub type Result<T> = std::result::Result<T, Error>;
