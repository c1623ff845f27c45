//! Dense hermitian linear algebra: spectra, functional calculus,
//! noncommutative meet/join and the lattice of projection ranges.

mod calculus;
mod eig;
mod hermitian;
pub mod matrix;
mod projection;
pub mod svd;

pub use calculus::{
    abs_op, apply_function, apply_isotone, is_nonderogatory, join, meet, Extension,
    IsotoneFunction,
};
pub(crate) use calculus::eig_tol;
pub use eig::{eig_hermitian, SpectralDecomposition};
pub use hermitian::Hermitian;
pub use matrix::{CMatrix, C};
pub use projection::{principal_sines, proj_join, proj_meet, Projection};
