//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by pencil construction, canonicalization and classification.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An operation that requires exact rational entries received an
    /// approximate (floating point) value.
    #[error("operation requires exact rational entries: {0}")]
    ApproxEntries(&'static str),

    /// Division by zero or inversion of a singular object.
    #[error("{0} is singular")]
    Singular(&'static str),

    /// The zero polynomial has no well-defined root list.
    #[error("root extraction on the zero polynomial")]
    ZeroPolynomial,

    /// Interpolation points must be pairwise distinct.
    #[error("interpolation points must be pairwise distinct")]
    RepeatedPoint,

    /// Matrix or tensor dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A structure record violates its invariants (unsorted indices, repeated
    /// eigenvalues, empty signatures, inconsistent bookkeeping).
    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    /// An eigenvalue passed to a type query does not belong to the structure.
    #[error("value does not belong to the structure")]
    UnknownEigenvalue,

    /// States live in incompatible spaces even after column padding.
    #[error("states are not comparable: {0}")]
    Incomparable(String),

    /// The requested enumeration slice contains infinite SLOCC families.
    #[error(
        "enumeration slice {0}x{1} contains infinite families (four or more distinct eigenvalues)"
    )]
    InfiniteFamilies(usize, usize),

    /// No class with the requested label exists in the registry.
    #[error("unknown class label `{0}`")]
    UnknownLabel(String),

    /// Floating-point structure extraction could not reach a consistent
    /// answer at the requested tolerance.
    #[error("numerical structure extraction failed: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
