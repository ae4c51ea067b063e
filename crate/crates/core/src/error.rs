use thiserror::Error;

/// Errors raised across the symbol pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("root at distance {distance:.3e} from the unit circle (|z| = {modulus})")]
    BoundaryRoot { modulus: f64, distance: f64 },

    #[error("symbol is not positive on the circle (min {min:.3e})")]
    NotPositive { min: f64 },

    #[error("symbol is not hermitian-symmetric (mismatch {mismatch:.3e})")]
    Asymmetric { mismatch: f64 },

    #[error("function comes within {min_modulus:.3e} of zero on the circle")]
    NearZeroOnCircle { min_modulus: f64 },

    #[error("grid of size {grid} too small for Fourier index {index}")]
    GridTooSmall { grid: usize, index: i64 },

    #[error("Hankel operator is zero")]
    ZeroOperator,

    #[error("kernel dimension did not stabilize below degree cap {cap}")]
    Unstable { cap: usize },

    #[error("symbol is nearly singular on the circle (min singular value {min_sv:.3e})")]
    NearSingularSymbol { min_sv: f64 },

    #[error("thematic completion unsupported: {0}")]
    UnsupportedCompletion(String),

    #[error("thematic reduction failed: {0}")]
    ReductionFailed(String),

    #[error("Hankel norm {norm} is not below 1")]
    NormNotBelowOne { norm: f64 },

    #[error("no calibration constant up to {c_max} reaches Hankel norm 1")]
    BracketFailed { c_max: f64 },

    #[error("peeled unimodular factor has Toeplitz index {index}, expected 1")]
    UnexpectedIndex { index: i64 },

    #[error("Hankel norm {norm} exceeds 1: no unitary interpolant exists")]
    NormTooLarge { norm: f64 },

    #[error("expected {expected} tail indices, got {got}")]
    WrongTailLength { expected: usize, got: usize },

    #[error("invalid index request: {0}")]
    InvalidIndices(String),

    #[error("symbol is not unitary-valued (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("function is not analytic: {0}")]
    NotAnalytic(String),

    #[error("denominator has a root at {root} inside the closed unit disk")]
    DiskZeroDenominator { root: String },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
