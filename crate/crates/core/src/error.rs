use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("deformation parameter q = {0} must lie strictly inside (0, 1)")]
    InvalidQ(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{name} = {value} lies outside [{lo}, {hi}]")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("finite-difference step {step} around x = {x} leaves a single branch of the involution")]
    BadStep { x: f64, step: f64 },

    #[error("eigen-decomposition failed: {0}")]
    Eigen(String),

    #[error("w-coefficients under-resolved: unitarity residual {residual:.3e} exceeds {limit:.1e}")]
    UnderResolved { residual: f64, limit: f64 },

    #[error("negative tail mass {0:.3e}: coefficient normalization is broken")]
    NegativeTail(f64),

    #[error("truncation defect {defect:.3e} exceeds {limit:.1e}; raise the level cutoff")]
    Truncation { defect: f64, limit: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
