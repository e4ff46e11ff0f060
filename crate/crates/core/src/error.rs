use thiserror::Error;

/// Errors produced by the laboratory.
#[derive(Debug, Error)]
pub enum QcError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample at node ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {0} is outside the domain")]
    OutsideDomain(String),

    #[error("points are in disconnected components of the pixel graph")]
    Disconnected,

    #[error("point {0} lies outside the reliable region of the grid")]
    OutsideReliableRegion(String),

    #[error("Beltrami coefficient has sup norm {0} >= 1")]
    NotContractive(f64),

    #[error("Neumann series did not reach tolerance within {terms} terms (last term ratio {last_ratio:.3e})")]
    NonConvergence {
        terms: usize,
        last_ratio: f64,
        term_norms: Vec<f64>,
    },

    #[error("Newton inversion did not converge for w = {0}")]
    InversionFailed(String),

    #[error("too few sample points: {0}")]
    InsufficientSamples(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, QcError>;
