//! Exact arithmetic for rank-3 lattice classes over a discrete valuation ring.
//!
//! The base ring is the localization of the integers at a prime `p`, viewed as
//! a discrete valuation ring inside the rationals with uniformizer `p`.
//! Homothety classes of rank-3 lattices form the vertices of an infinite
//! two-dimensional simplicial complex: two classes are joined by an edge when
//! their elementary-divisor distance is 1, and three pairwise-adjacent classes
//! span a face.  This crate constructs that complex locally and exactly:
//!
//! * [`dvr`] — valuations, residue-field arithmetic, lifting.
//! * [`mat`] — exact 3x3 rational matrices with text and JSON formats.
//! * [`lattice`] — canonical class representatives, tight-fitting scaling,
//!   adapted bases (elementary divisors), the distance function, vertex types.
//! * [`building`] — neighbor and face enumeration through residue subspaces,
//!   edge orientation, shortest connecting paths, and the one-step distance
//!   classifier.
//! * [`homotopy`] — loop contraction: every closed edge path contracts to its
//!   basepoint through a certified sequence of elementary moves.
//! * [`group`] — the `SL3` action on classes, stabilizer and intersection
//!   membership, constructive face transitivity, and factorization of an
//!   arbitrary determinant-1 matrix as a word in the three face-vertex
//!   stabilizers.
//! * [`sampling`] — seeded random generators for classes, loops, and group
//!   elements, shared by the CLI and the test suites.
//! * [`selftest`] — a bounded, deterministic property suite used by the
//!   `sl3b selftest` subcommand.
//!
//! All arithmetic is exact; no floating point is used anywhere.

pub mod building;
pub mod dvr;
pub mod group;
pub mod homotopy;
pub mod lattice;
pub mod mat;
pub mod sampling;
pub mod selftest;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("scalar is not integral at p")]
    NotIntegral,
    #[error("matrix is singular")]
    Singular,
    #[error("lattice is not tight-fitting")]
    NotTightFitting,
    #[error("classes are not adjacent")]
    NotAdjacent,
    #[error("vertices do not form a face")]
    NotAFace,
    #[error("consecutive path vertices are not adjacent")]
    InvalidPath,
    #[error("path is not closed")]
    NotClosed,
    #[error("matrix determinant is not exactly 1")]
    NotUnimodular,
    #[error("element does not preserve the face")]
    DoesNotPreserveFace,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("contraction invariant violated: {0}")]
    Contraction(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use building::{
    classify_step, connecting_path, edge_orientation, faces_at_edge, faces_at_vertex, is_adjacent,
    is_face, neighbors, subspaces, Edge, Face, ResidueSubspace, StepCase,
};
pub use dvr::{DVRContext, ResidueScalar, Scalar, Valuation};
pub use group::{
    act, alpha, beta, check_without_inversion, factor_in_amalgam, in_intersection, in_stabilizer,
    map_face_to_face, multiply_word, standard_face, AmalgamWord, GroupElement, Intersection,
    SubgroupTag,
};
pub use homotopy::{
    contract_loop, contract_loop_traced, remove_backtracks, verify_moves, ContractionMeasure,
    ContractionMove, EdgePath,
};
pub use lattice::{
    adapted_bases, canonical_class, distance, tight_fit, vertex_type, ElementaryDivisors,
    LatticeBasis, LatticeClass,
};
pub use mat::Mat3;
