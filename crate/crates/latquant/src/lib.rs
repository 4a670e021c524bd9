//! Exact construction of lattice Voronoi cells and their second moments.
//!
//! This crate builds the symmetry-reduced face hierarchy of the Voronoi cell
//! of a lattice with known automorphism group, computes its volume, barycenter
//! and second-moment tensor in exact arithmetic, and optimizes one-parameter
//! laminated lattice families by interpolating the second moment `U(a)` and
//! isolating the minimizing root exactly.
//!
//! The main entry points are:
//!
//! * [`lattice::Lattice`] and [`lattice::catalog`] — lattices by name
//!   (`Z<n>`, `A2`, `A3`, `D<n>`, `K12`, `K12-laminated`), lamination and
//!   product constructions, relevant vectors, closest-point search.
//! * [`symmetry`] — a self-contained finite matrix/permutation group engine:
//!   orbits with witnesses, base-and-strong-generating-set algorithms,
//!   stabilizers, coset algebra.
//! * [`voronoi`] — vertex discovery and the reduced face hierarchy.
//! * [`moments`] — exact recursive volumes, barycenters and second-moment
//!   tensors over the hierarchy; the quantizer constant `G`.
//! * [`family`] — analysis and exact optimization of laminated families.
//!
//! Everything downstream of the lattice definition is exact: floating-point
//! values are carried only as shadows for pre-filtering and search, and every
//! accepted result is certified in `Q` or a fixed quadratic extension
//! `Q(√d)`.

pub mod exact;
pub mod linalg;
pub mod lattice;
pub mod symmetry;
pub mod voronoi;
pub mod moments;
pub mod family;
pub mod report;

pub use exact::{ExactError, ExactScalar, Rational};
pub use linalg::{ExactMatrix, ExactVector};

/// The long-form guide. Chapters live in `book/src` and are included here
/// so that `cargo test --doc` runs every code snippet in the book.
pub mod guide;
