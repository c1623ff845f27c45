//! Computable finite-dimensional noncommutative ordered spaces.
//!
//! The crate builds isocones in direct sums of matrix algebras
//! `A = ⊕ₓ M_{nₓ}(ℂ)`, decides membership, checks the isocone axioms,
//! extracts the orders induced on spectra and states, decomposes pairs of
//! projections, and reconstructs the poset-plus-inner-cone normal form of a
//! cone given only a membership oracle.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`.

pub mod algebra;
pub mod classify;
pub mod error;
pub mod herm;
pub mod isocone;
pub mod order_maps;
pub mod poset;
pub mod random;
pub mod scalar;
pub mod spec_doc;
pub mod two_subspace;

pub use error::{Error, Result};
pub use scalar::{Real, ToleranceConfig};

pub type Hermitian64 = herm::Hermitian<f64>;
pub type Hermitian32 = herm::Hermitian<f32>;
pub type Projection64 = herm::Projection<f64>;
pub type BlockElement64 = algebra::BlockElement<f64>;
pub type BlockElement32 = algebra::BlockElement<f32>;
pub type ClassifiedIsocone64 = isocone::ClassifiedIsocone<f64>;
pub type ClassifiedIsocone32 = isocone::ClassifiedIsocone<f32>;
pub type BlochRegion64 = isocone::BlochRegion<f64>;
