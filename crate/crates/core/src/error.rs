use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension n must be at least 1")]
    ZeroDimension,

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("dilation factor must be positive, got {0}")]
    NonPositiveDilation(f64),

    #[error("matrix is not an orthogonal [[A,B],[-B,A]] block rotation (defect {defect:e})")]
    NotBlockRotation { defect: f64 },

    #[error("point is not on the surface (residual {residual:e})")]
    NotOnSurface { residual: f64 },

    #[error("point {0:?} lies outside the domain box")]
    OutOfDomain(Vec<f64>),

    #[error("degenerate gradient of the defining function (norm {0:e})")]
    DegenerateGradient(f64),

    #[error("characteristic point (|N^H| = {0:e})")]
    Characteristic(f64),

    #[error("vector is not horizontal-tangent (normal component {0:e})")]
    NotTangent(f64),

    #[error("vector is not unit length (norm {0})")]
    NotUnit(f64),

    #[error("invalid domain box: {0}")]
    InvalidBox(String),

    #[error("surface kind does not support this operation: {0}")]
    Unsupported(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("second fundamental form routes disagree by {0:e}")]
    RouteMismatch(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
