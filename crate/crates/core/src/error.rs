use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not symplectic: {0}")]
    NotSymplectic(String),
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("symbolic contraction capped at depth {cap}, requested {depth}")]
    DegreeCap { depth: usize, cap: usize },
    #[error("probability mass leak of {0:e}")]
    MassLeak(f64),
    #[error("zero normalization")]
    ZeroNorm,
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: String, iterations: usize },
    #[error("fit failed: {0}")]
    FitFailed(String),
    #[error("resource guard: {0}")]
    ResourceGuard(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
