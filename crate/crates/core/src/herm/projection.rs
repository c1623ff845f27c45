//! Orthogonal projections and the lattice of their ranges.

use super::eig::eig_hermitian;
use super::hermitian::Hermitian;
use super::matrix::CMatrix;
use super::svd::{range_basis, svd};
use crate::error::{input, Error, Result};
use crate::scalar::Real;

/// An orthogonal projection with its rank and an orthonormal range basis.
#[derive(Clone, Debug)]
pub struct Projection<T> {
    matrix: Hermitian<T>,
    basis: CMatrix<T>,
}

impl<T: Real> Projection<T> {
    /// Checks `p² = p` within `tol`.
    pub fn new(p: Hermitian<T>, tol: T) -> Result<Self> {
        let sq = p.matrix().matmul(p.matrix());
        let err = (&sq - p.matrix()).frobenius();
        if err > tol * T::from_usize_lossy(p.dim()).max(T::one()) {
            return Err(input(format!("not a projection (‖p² − p‖ = {err})")));
        }
        let e = eig_hermitian(&p, tol.max(T::solver_floor()))?;
        let idx: Vec<usize> = (0..e.dim()).filter(|&k| e.values[k] > T::lit(0.5)).collect();
        let basis = e.vectors.columns(&idx);
        let matrix = basis.outer_self();
        Ok(Self {
            matrix: Hermitian::symmetrize(&matrix),
            basis,
        })
    }

    /// Projection onto the span of orthonormal columns.
    pub fn from_orthonormal(basis: CMatrix<T>) -> Self {
        let matrix = Hermitian::symmetrize(&basis.outer_self());
        Self { matrix, basis }
    }

    /// Projection onto the span of arbitrary columns.
    pub fn onto_span(vectors: &CMatrix<T>, rank_tol: T) -> Self {
        Self::from_orthonormal(range_basis(vectors, rank_tol))
    }

    pub fn zero(n: usize) -> Self {
        Self::from_orthonormal(CMatrix::zeros(n, 0))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_orthonormal(CMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn matrix(&self) -> &Hermitian<T> {
        &self.matrix
    }

    /// Orthonormal basis of the range (dim × rank).
    pub fn basis(&self) -> &CMatrix<T> {
        &self.basis
    }

    pub fn complement(&self) -> Self {
        let n = self.dim();
        let e = eig_hermitian(&Hermitian::identity(n).sub(&self.matrix), T::solver_floor().max(T::lit(1e-12)))
            .expect("complement eigensolve");
        let idx: Vec<usize> = (0..n).filter(|&k| e.values[k] > T::lit(0.5)).collect();
        Self::from_orthonormal(e.vectors.columns(&idx))
    }

    pub fn distance(&self, other: &Self) -> T {
        self.matrix.sub(&other.matrix).frobenius()
    }

    pub fn same_range(&self, other: &Self, tol: T) -> bool {
        self.rank() == other.rank() && self.distance(other) <= tol
    }

    pub fn commutes_with(&self, other: &Self, tol: T) -> bool {
        self.matrix.commutator_norm(&other.matrix) <= tol
    }
}

/// Shared rank-revealing step: SVD of `(1 − p)·B_q`.
///
/// Right singular vectors with σ ≤ `tol` give `range(p) ∩ range(q)`; left
/// singular vectors with σ > `tol` complete `range(p)` to `range(p) + range(q)`.
fn split<T: Real>(p: &Projection<T>, q: &Projection<T>, tol: T) -> Result<(CMatrix<T>, CMatrix<T>)> {
    if p.dim() != q.dim() {
        return Err(Error::Dimension { expected: p.dim(), found: q.dim() });
    }
    let n = p.dim();
    let comp = &CMatrix::identity(n) - p.matrix().matrix();
    let m = comp.matmul(q.basis());
    let d = svd(&m);
    let small: Vec<usize> = (0..d.s.len()).filter(|&i| d.s[i] <= tol).collect();
    let large: Vec<usize> = (0..d.s.len()).filter(|&i| d.s[i] > tol).collect();
    let meet = q.basis().matmul(&d.v.columns(&small));
    let extra = d.u.columns(&large);
    Ok((meet, extra))
}

/// Projection onto `range(p) ∩ range(q)`.
pub fn proj_meet<T: Real>(p: &Projection<T>, q: &Projection<T>, tol: T) -> Result<Projection<T>> {
    let (meet, _) = split(p, q, tol)?;
    // re-orthonormalize against accumulated rounding
    Ok(Projection::onto_span(&meet, T::lit(0.5)))
}

/// Projection onto `range(p) + range(q)`.
pub fn proj_join<T: Real>(p: &Projection<T>, q: &Projection<T>, tol: T) -> Result<Projection<T>> {
    let (_, extra) = split(p, q, tol)?;
    Ok(Projection::onto_span(&p.basis().hstack(&extra), T::lit(0.5)))
}

/// Principal-angle sines between `range(q)` and `range(p)`, ascending.
pub fn principal_sines<T: Real>(p: &Projection<T>, q: &Projection<T>) -> Vec<T> {
    let n = p.dim();
    let comp = &CMatrix::identity(n) - p.matrix().matrix();
    let mut s = svd(&comp.matmul(q.basis())).s;
    s.reverse();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herm::matrix::C;

    fn proj_vec(v: &[f64]) -> Projection<f64> {
        let col: Vec<C<f64>> = v.iter().map(|&x| C::new(x, 0.0)).collect();
        Projection::onto_span(&CMatrix::from_columns(v.len(), &[col]), 1e-12)
    }

    fn diagp(d: &[f64]) -> Projection<f64> {
        Projection::new(Hermitian::from_real_diag(d), 1e-12).unwrap()
    }

    #[test]
    fn equal_projections() {
        let p = diagp(&[1.0, 0.0, 1.0]);
        assert!(proj_meet(&p, &p, 1e-9).unwrap().same_range(&p, 1e-12));
        assert!(proj_join(&p, &p, 1e-9).unwrap().same_range(&p, 1e-12));
    }

    #[test]
    fn orthogonal_axes() {
        let p = diagp(&[1.0, 0.0]);
        let q = diagp(&[0.0, 1.0]);
        assert_eq!(proj_meet(&p, &q, 1e-9).unwrap().rank(), 0);
        let j = proj_join(&p, &q, 1e-9).unwrap();
        assert!(j.same_range(&Projection::identity(2), 1e-12));
    }

    #[test]
    fn diagonal_line_against_axis() {
        let s = 0.5f64.sqrt();
        let p = proj_vec(&[1.0, 0.0]);
        let q = proj_vec(&[s, s]);
        // rank oracle: the stacked 2×2 basis [e1, (e1+e2)/√2] has rank 2
        let stacked = p.basis().hstack(q.basis());
        assert_eq!(crate::herm::svd::rank(&stacked, 1e-9), 2);
        assert_eq!(proj_meet(&p, &q, 1e-9).unwrap().rank(), 0);
        assert_eq!(proj_join(&p, &q, 1e-9).unwrap().rank(), 2);
    }

    #[test]
    fn not_a_projection() {
        assert!(Projection::new(Hermitian::from_real_diag(&[0.5, 1.0]), 1e-9).is_err());
    }

    #[test]
    fn planes_meet_in_line() {
        // span(e1,e2) ∩ span(e1,e3) = span(e1)
        let p = diagp(&[1.0, 1.0, 0.0]);
        let q = diagp(&[1.0, 0.0, 1.0]);
        let m = proj_meet(&p, &q, 1e-9).unwrap();
        assert!(m.same_range(&diagp(&[1.0, 0.0, 0.0]), 1e-12));
        assert_eq!(proj_join(&p, &q, 1e-9).unwrap().rank(), 3);
    }
}
