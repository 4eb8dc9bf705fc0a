use thiserror::Error;

/// Errors raised by the laboratory operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    DimensionZero,

    #[error("dimension {0} exceeds the supported maximum of {max}", max = crate::MAX_DIM)]
    DimensionTooLarge(usize),

    #[error("dimension {got} is too small (need at least {min})")]
    DimensionTooSmall { got: usize, min: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("all amplitudes vanish; cannot normalize")]
    ZeroVector,

    #[error("not a density operator: {0}")]
    NotDensityOperator(String),

    #[error("not unitary (max deviation of U†U from I is {0:e})")]
    NotUnitary(f64),

    #[error("vectors do not form an orthonormal basis: {0}")]
    NotBasis(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("consecutive loop states {index} and {next} are orthogonal")]
    OrthogonalLink { index: usize, next: usize },

    #[error("loop is not closed (last state differs from first)")]
    OpenLoop,

    #[error("no mutually unbiased basis construction for dimension {0}")]
    UnsupportedDimension(usize),

    #[error("Fisher-Rao metric diverges: p[{index}] = {p:e} with dp = {dp:e}")]
    BoundarySingularity { index: usize, p: f64, dp: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("value {0} outside [0, 1]")]
    OutOfRange(f64),

    #[error("bases are not mutually unbiased (max deviation {0:e})")]
    NotUnbiased(f64),

    #[error("no phase assignment reproduces the data (best residual {residual:e})")]
    InfeasibleData { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
