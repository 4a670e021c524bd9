//! Finite matrix-group engine: orbits with witnesses, faithful permutation
//! images with base-and-strong-generating-set support, stabilizers of
//! points / vectors / sets, coset algebra for the transformation search,
//! and symmetry discovery for laminated lattices.

pub mod backtrack;
pub mod chain;
pub mod coset;
pub mod group;
pub mod perm;

pub use chain::StabChain;
pub use coset::{coset_intersect, transformation_coset, Coset, COSET_ENUMERATION_THRESHOLD};
pub use group::{
    classify_vectors, discover_laminated_symmetry, orbit_with_witnesses, to_permutation_group,
    ClassifiedVectors, GroundAction, MatrixGroup, PermutationGroup, VectorOrbit,
};
pub use perm::{Perm, PermRef};

/// Errors from the group engine.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymmetryError {
    #[error("generator {0} is not orthogonal")]
    NotOrthogonal(usize),
    #[error("ground set is not invariant under the group")]
    GroundNotInvariant,
    #[error("action on the ground set is not faithful (set does not span)")]
    UnfaithfulAction,
    #[error("orbit exceeded the configured cap of {0}")]
    OrbitCapExceeded(usize),
    #[error("vectors are not equivalent under the acting group")]
    ClassMismatch,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invariance error: {0}")]
    Invariance(String),
}
