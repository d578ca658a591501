use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator and its numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integration diverged at tau = {tau}")]
    Diverged { tau: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("non-physical covariance: denominator {0} <= 0")]
    NonPhysicalCovariance(f64),

    #[error("drift matrix is not Hurwitz stable (max Re(lambda) = {max_re})")]
    NotHurwitz { max_re: f64 },

    #[error("singular linear system")]
    Singular,

    #[error("algebraic Lyapunov residual {residual:e} exceeds bound {bound:e}")]
    Residual { residual: f64, bound: f64 },

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("config error: {0}")]
    Config(String),

    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
