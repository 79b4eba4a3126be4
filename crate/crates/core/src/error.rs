//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A constructor precondition was violated (bad parameter range,
    /// non-normalised weights, and so on).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two objects that must share a shape do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A mode index fell outside `1..=modes`.
    #[error("mode index {index} out of range for {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },

    /// An operation would require materialising a Hilbert-space object
    /// larger than the supported dense cap.
    #[error("size cap exceeded: dimension {dim} > cap {cap}")]
    SizeCapExceeded { dim: usize, cap: usize },

    /// The postselection projects the input to the zero vector; the
    /// prescription forbids this input outright.
    #[error("postselection annihilates input (output norm {norm:.3e})")]
    PostselectionAnnihilatesInput { norm: f64 },

    /// A validation check on a density operator failed.
    #[error("density validation failed: {0}")]
    DensityInvalid(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
