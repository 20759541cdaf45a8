//! Crate-wide error type.

use thiserror::Error;

/// Errors produced anywhere in the lab.
#[derive(Debug, Error)]
pub enum Error {
    /// Tensor/layer dimensions do not conform.
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    /// A scalar or structural argument violated an operation's contract.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A model or training configuration is internally inconsistent
    /// (e.g. cross-entropy without a softmax output layer).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A document could not be parsed at all.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// A document parsed but violated a structural invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// An arena allocation would run past the end of the buffer.
    #[error("arena capacity exceeded: need {needed} floats, capacity {capacity}")]
    CapacityExceeded { needed: usize, capacity: usize },

    /// A checked copy would write past its region.
    #[error("copy of {len} floats exceeds region '{region}' of length {region_len}")]
    RegionOverflow {
        region: String,
        len: usize,
        region_len: usize,
    },

    /// A checked copy targeted a constant region after initialization.
    #[error("region '{0}' is constant memory: read-only after initialization")]
    ReadOnlyRegion(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shapes(expected: impl std::fmt::Debug, got: impl std::fmt::Debug) -> Self {
        Error::ShapeMismatch {
            expected: format!("{expected:?}"),
            got: format!("{got:?}"),
        }
    }
}
