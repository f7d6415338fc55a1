use thiserror::Error;

/// Failures raised by the spectral, model, and dynamics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("lattice mismatch: {left} vs {right}")]
    LatticeMismatch { left: String, right: String },
    #[error("non-finite coefficient at mode {mode:?}")]
    NonFinite { mode: [i64; 2] },
    #[error("Hermitian symmetry violated at mode {mode:?} (relative defect {defect:e})")]
    NotHermitian { mode: [i64; 2], defect: f64 },
    #[error("zero-mode singularity: exponent {exponent} < 0 with nonzero mean")]
    ZeroModeSingularity { exponent: f64 },
    #[error("overflow risk: exponent {exponent:.3} exceeds cap {cap:.3}")]
    OverflowRisk { exponent: f64, cap: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("tail not controllable: 2s = {two_s} must exceed {required}")]
    TailNotControllable { two_s: f64, required: f64 },
    #[error("bracket width {width:e} exceeds tolerance {tol:e} at search radius {radius}")]
    BracketNotCertified { width: f64, tol: f64, radius: i64 },
    #[error("path grid does not cover requested time {0}")]
    PathTooShort(f64),
    #[error("time {0} is not on the path grid")]
    OffGrid(f64),
    #[error("nonpositive norm in fit window at t = {t}")]
    NonPositiveNorm { t: f64 },
    #[error("{found} samples in fit window, need at least {required}")]
    InsufficientSamples { found: usize, required: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
