use alloc::string::String;

/// Errors raised by the curvature pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CurvError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("valence mismatch: expected (0,{expected}), got (0,{got})")]
    ValenceMismatch { expected: usize, got: usize },
    #[error("unsupported dimension {0} (max {max})", max = crate::jet::MAX_DIM)]
    UnsupportedDimension(usize),
    #[error("singular metric (det = {0:e})")]
    SingularMetric(f64),
    #[error("point outside the chart domain of `{0}`")]
    OutsideDomain(String),
    #[error("Weyl tensor is produced only for n >= 4, got n = {0}")]
    WeylUndefined(usize),
    #[error("symmetry defect {defect:e} exceeds tolerance in {what}")]
    SymmetryDefect { what: &'static str, defect: f64 },
    #[error("non-positive warping function F = {0:e}")]
    NonPositiveWarp(f64),
    #[error("empty basis")]
    EmptyBasis,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("missing prerequisite: {0}")]
    MissingPrerequisite(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownMetric(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: String, reason: String },
}

pub type Result<T> = core::result::Result<T, CurvError>;
