use num_complex::Complex;

use super::matrix::{CMatrix, C};
use crate::error::{input, Result};
use crate::scalar::Real;

/// A dense self-adjoint matrix. Entries are exactly conjugate-symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian<T> {
    m: CMatrix<T>,
}

impl<T: Real> Hermitian<T> {
    /// Validates squareness and conjugate symmetry (within `tol * max(1, ‖m‖_F)`),
    /// then symmetrizes exactly.
    pub fn from_matrix(m: CMatrix<T>, tol: T) -> Result<Self> {
        if !m.is_square() {
            return Err(input(format!(
                "hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let asym = asymmetry(&m);
        let bound = tol * m.frobenius().max(T::one());
        if asym > bound {
            return Err(input(format!(
                "matrix is not conjugate-symmetric (asymmetry {asym} > {bound})"
            )));
        }
        Ok(Self::symmetrize(&m))
    }

    /// `(m + m*)/2`, no checks beyond squareness.
    pub fn symmetrize(m: &CMatrix<T>) -> Self {
        assert!(m.is_square(), "symmetrize needs a square matrix");
        let half = T::lit(0.5);
        let n = m.rows();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = C::new(m[(i, i)].re, T::zero());
            for j in (i + 1)..n {
                let z = (m[(i, j)] + m[(j, i)].conj()) * half;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        Self { m: out }
    }

    pub fn zeros(n: usize) -> Self {
        Self { m: CMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { m: CMatrix::identity(n) }
    }

    pub fn scalar(n: usize, c: T) -> Self {
        Self::identity(n).scale(c)
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        Self { m: CMatrix::from_real_diag(diag) }
    }

    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self> {
        Self::from_matrix(CMatrix::from_real_rows(rows), T::lit(1e-12).max(T::epsilon()))
    }

    /// `c·1 + v·σ` for a 3-vector `v` (Pauli basis).
    pub fn pauli(c: T, v: [T; 3]) -> Self {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = C::new(c + v[2], T::zero());
        m[(1, 1)] = C::new(c - v[2], T::zero());
        m[(0, 1)] = C::new(v[0], -v[1]);
        m[(1, 0)] = C::new(v[0], v[1]);
        Self { m }
    }

    /// Inverse of [`Hermitian::pauli`]: `(tr/2, bloch vector)`. Panics unless 2×2.
    pub fn pauli_coords(&self) -> (T, [T; 3]) {
        assert_eq!(self.dim(), 2, "pauli coordinates need a 2x2 matrix");
        let half = T::lit(0.5);
        let a = &self.m;
        let c = (a[(0, 0)].re + a[(1, 1)].re) * half;
        let z = (a[(0, 0)].re - a[(1, 1)].re) * half;
        (c, [a[(1, 0)].re, a[(1, 0)].im, z])
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.m[(i, j)]
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self { m: &self.m + &rhs.m }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self { m: &self.m - &rhs.m }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { m: self.m.scale(s) }
    }

    pub fn add_scalar(&self, c: T) -> Self {
        let mut m = self.m.clone();
        for i in 0..m.rows() {
            m[(i, i)].re += c;
        }
        Self { m }
    }

    pub fn trace(&self) -> T {
        self.m.trace().re
    }

    pub fn frobenius(&self) -> T {
        self.m.frobenius()
    }

    /// Frobenius inner product `tr(ab)`, real for hermitian arguments.
    pub fn inner(&self, rhs: &Self) -> T {
        let n = self.dim();
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                acc += (self.m[(i, j)] * rhs.m[(j, i)]).re;
            }
        }
        acc
    }

    /// `U a U*`.
    pub fn conjugate_by(&self, u: &CMatrix<T>) -> Self {
        Self::symmetrize(&u.matmul(&self.m).matmul(&u.adjoint()))
    }

    /// `B* a B` for a (possibly rectangular) `B`.
    pub fn compress(&self, basis: &CMatrix<T>) -> Self {
        Self::symmetrize(&basis.adjoint().matmul(&self.m).matmul(basis))
    }

    pub fn commutator_norm(&self, rhs: &Self) -> T {
        let ab = self.m.matmul(&rhs.m);
        let ba = rhs.m.matmul(&self.m);
        (&ab - &ba).frobenius()
    }

    pub fn commutes_with(&self, rhs: &Self, tol: T) -> bool {
        self.commutator_norm(rhs) <= tol * self.frobenius().max(T::one()) * rhs.frobenius().max(T::one())
    }

    /// Real coordinates in an orthonormal basis of Herm(n) (n² reals).
    pub fn real_coords(&self) -> Vec<T> {
        let n = self.dim();
        let sqrt2 = T::lit(2.0).sqrt();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            out.push(self.m[(i, i)].re);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.m[(i, j)].re * sqrt2);
                out.push(self.m[(i, j)].im * sqrt2);
            }
        }
        out
    }

    pub fn cast<U: Real>(&self) -> Hermitian<U> {
        Hermitian { m: self.m.cast() }
    }
}

fn asymmetry<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.rows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            let d: Complex<T> = m[(i, j)] - m[(j, i)].conj();
            worst = worst.max(d.norm());
        }
    }
    worst
}
