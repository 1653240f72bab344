//! Error taxonomy shared by every module of the crate.
//!
//! The variants mirror the failure classes of the public operations:
//! bad inputs (`InvalidParameter`, `DimensionMismatch`), model construction
//! failures (`DegenerateProfile`), mathematical preconditions that do not
//! hold at the requested point (`DomainError`), and numerical breakdowns
//! that should be impossible under the documented preconditions but are
//! guarded anyway (`NumericalFailure`).

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two inputs that must share a shape (dimension, side length, size) do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A variance profile with no mass on the torus cannot be normalized.
    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),

    /// The requested evaluation point lies outside the mathematical domain
    /// of the operation (e.g. |m| >= 1 where a Neumann series must converge).
    #[error("domain error: {0}")]
    DomainError(String),

    /// A numerical routine failed to meet its contract (e.g. factorization
    /// breakdown). Guarded even where analysis says it cannot happen.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand constructor for [`Error::InvalidParameter`].
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
