use alloc::string::String;

/// Errors raised by the partitioning engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("arithmetic overflow computing {0}")]
    Overflow(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("inconsistent variety parameters: {0}")]
    InconsistentVariety(String),
    #[error("variety kind `{0}` has no sampler")]
    UnsupportedVariety(&'static str),
    #[error("root isolation failed: {0}")]
    RootIsolation(&'static str),
    #[error("schedule infeasible at delta={delta}: grad bound {bound} * delta >= epsilon {epsilon}")]
    ScheduleInfeasible { delta: f64, bound: f64, epsilon: f64 },
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("block {0} has zero norm")]
    ZeroBlock(usize),
    #[error("sign-vector length {0} exceeds the supported maximum of 20")]
    TooManyFactors(usize),
    #[error("frequency u must be nonzero")]
    ZeroFrequency,
    #[error("point lies on a hemisphere boundary (t_{0} ~ 0)")]
    HemisphereBoundary(usize),
    #[error("point is not a zero of the model map (residual {0})")]
    NotAZero(f64),
    #[error("continuation failed from every start; last residuals {0:?}")]
    ContinuationFailed(alloc::vec::Vec<f64>),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
