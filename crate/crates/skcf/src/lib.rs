//! Canonical forms and SLOCC equivalence for tripartite pure states of
//! shape 2 x m x n.
//!
//! A state |psi> = |0> (x) R + |1> (x) S is stored as its two qubit slices,
//! which form the matrix pencil mu R + lambda S. The pipeline is
//!
//! 1. [`pencil_of_state`]: read off the pencil,
//! 2. [`kronecker_structure`]: extract the Kronecker invariants (zero block,
//!    minimal indices, eigenvalues with size signatures), exactly whenever
//!    the amplitudes are exact Gaussian rationals,
//! 3. [`canonicalize`]: order the invariants and push the eigenvalues
//!    through the linear fractional transformation that minimizes them,
//!    yielding the state Kronecker canonical form.
//!
//! Two states are SLOCC-equivalent exactly when their canonical forms agree,
//! which is what [`equivalent`] decides. The [`classify`] module enumerates
//! all classes per dimension cell and carries the labeled registry of the
//! 26 classes reachable in 2 x 3 x n.

pub mod canonical;
pub mod classify;
pub mod error;
pub mod kronecker;
pub mod mat;
pub mod moebius;
pub mod pencil;
pub mod poly;
pub mod scalar;
pub mod state;

pub use canonical::{
    canonicalize, equivalent, eta_ordered, normalize_eigenvalues, order_signatures, same_type,
    CanonicalForm, EtaGroup, Meta, NormalizationMode,
};
pub use classify::{
    class_registry, embed_structure, enumerate_all, enumerate_cell, enumerate_classes, find_label,
    orbit_check, registry_label, representative_state, structural_label, ClassEntry, OrbitReport,
};
pub use error::{Error, Result};
pub use kronecker::{
    build_pencil, check_dimensions, kronecker_structure, EigRecord, KroneckerStructure,
    SizeSignature,
};
pub use mat::Mat;
pub use moebius::{lft_of_qubit_op, Lft};
pub use pencil::{pencil_of_state, state_of_pencil, transpose_pencil, Pencil};
pub use poly::UniPoly;
pub use scalar::{approx_eq, snap_to_gauss_rational, ExtScalar, GaussRational, Scalar};
pub use state::{LocalOps, State};

/// Default relative tolerance for approximate comparisons and root merging.
pub const DEFAULT_TOL: f64 = 1e-9;
