//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The requested Fock space parameters are out of range.
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    /// Two objects living on different Fock spaces were combined.
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    /// A vector or matrix has the wrong length for its space.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    /// The zero vector (or a non-finite one) does not represent a state.
    #[error("undefined state: {0}")]
    UndefinedState(String),
    /// The affine chart needs a nonzero ground-state amplitude.
    #[error("affine chart undefined: |z^[0]| = {0:e}")]
    Chart(f64),
    /// An operation required a Hermitian operator.
    #[error("operator is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),
    /// An operator polynomial is too long for the truncated space.
    #[error("ladder degree {degree} exceeds the cutoff {cutoff}")]
    Truncation { degree: usize, cutoff: usize },
    /// A numeric or index argument is outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Overlapping reconstructions of the same amplitude disagree.
    #[error("inconsistent data at flat index {index}: relative disagreement {disagreement:e}")]
    Inconsistent { index: usize, disagreement: f64 },
    /// The recursive reconstruction needs a nonzero seed expectation.
    #[error("singular seed: |f| = {0:e} is below 1e-12")]
    SingularSeed(f64),
    /// Reading or writing files failed.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
