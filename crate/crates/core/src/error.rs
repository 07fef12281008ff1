use thiserror::Error;

/// Errors raised by the numerical kernels, models and invariant calculations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZbError {
    #[error("matrix is not Hermitian: ||H - H^dagger||_max = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix dimension {0} outside the supported range 1..=8")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not normalized: ||psi|| = {norm:.12}")]
    NotNormalized { norm: f64 },

    #[error("spin 2J = {two_j} is not supported by the {basis} basis")]
    UnsupportedBasis { two_j: u32, basis: &'static str },

    #[error("band label {label} out of range (largest allowed {max})")]
    BandLabelOutOfRange { label: u32, max: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gapless point: {0}")]
    Gapless(String),

    #[error("not a high-symmetry point: residual {residual:.3e} at k = {k:?}")]
    NotAnHsp { k: Vec<f64>, residual: f64 },

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("momentum grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("unsupported spinor branch: {0}")]
    UnsupportedBranch(String),

    #[error("band touching at k = {k:?} (gap {gap:.3e})")]
    BandTouching { k: Vec<f64>, gap: f64 },

    #[error("not converged: {0}")]
    NotConverged(String),

    #[error("operation not supported for this model: {0}")]
    UnsupportedModel(String),
}

pub type Result<T> = std::result::Result<T, ZbError>;
