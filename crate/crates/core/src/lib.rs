//! Eigenbundle topology of normal, multiplicity-free matrix fields over `S²`
//! and `S² × S²`.
//!
//! A normal matrix field with pointwise distinct eigenvalues splits the
//! trivial bundle into eigen-line bundles. This crate computes their first
//! Chern numbers (which decide unitary diagonalizability), the
//! unitary-equivalence invariant of two fields sharing a characteristic
//! polynomial, the integer relations those numbers must satisfy, and
//! constructions realizing prescribed obstructions.
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]

extern crate alloc;

pub mod chern;
pub mod construct;
pub mod equivalence;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod matrixfield;
pub mod relations;
pub mod spectral;

pub use error::{Error, Result};
pub use geometry::{
    build_product_domain, build_sphere_grid, Cycle, CycleBasis, CycleEmbedding, Domain, EmbeddedPoint, Plaquette,
    PlaquetteKind, Point, ProductDomain, SphereGrid, SpherePoint,
};
pub use linalg::CMatrix;
pub use matrixfield::MatrixField;
