//! Error type shared by the whole crate.

use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes for toolkit operations.
///
/// Soft conditions (a see-saw hitting its iteration cap, a bound that
/// shows no violation) are reported as flags on the result types, not as
/// errors.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed or mutually inconsistent arguments (dimension mismatch,
    /// zero vector, empty matrix, out-of-domain parameter).
    InvalidArgument(String),
    /// All coefficients vanish, so the local bound is zero and the
    /// inequality cannot be normalized.
    DegenerateInequality,
    /// The request is well-formed but exceeds a hard resource cap, such as
    /// the `2^m` local-bound enumeration limit or the embedding dimension
    /// cap.
    ResourceLimit(String),
    /// A requested visibility or mixing weight lies outside what the model
    /// can reach.
    OutOfRange(String),
    /// Correlation data that cannot come from a joint distribution, e.g. an
    /// outcome probability that is significantly negative.
    InconsistentCorrelation(String),
    /// An internal guarantee failed: a root bracket did not straddle a sign
    /// change, quadrature failed to converge, or a provably real quantity
    /// came out complex. Indicates a bug or numerically hostile input.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::DegenerateInequality => {
                write!(f, "degenerate inequality: all coefficients are zero")
            }
            Error::ResourceLimit(msg) => write!(f, "resource limit: {msg}"),
            Error::OutOfRange(msg) => write!(f, "out of range: {msg}"),
            Error::InconsistentCorrelation(msg) => {
                write!(f, "inconsistent correlation data: {msg}")
            }
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
