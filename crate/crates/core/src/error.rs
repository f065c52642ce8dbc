use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is numerically singular: {0}")]
    Singular(String),

    #[error("rank deficient: {0}")]
    RankDeficient(String),

    #[error("search failed: every start ended in the penalty region (best value {best_penalty:e})")]
    SearchFailed { best_penalty: f64 },

    #[error("degenerate target: L2 norm {norm:e} is too small for a relative error")]
    DegenerateTarget { norm: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
