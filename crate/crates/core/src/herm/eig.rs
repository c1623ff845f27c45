//! Cyclic Jacobi eigensolver for complex hermitian matrices.

use super::hermitian::Hermitian;
use super::matrix::{CMatrix, C};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 60;

/// Ascending eigensystem `a = U diag(λ) U*`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T> {
    pub values: Vec<T>,
    /// Eigenvectors as columns.
    pub vectors: CMatrix<T>,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn reconstruct(&self) -> Hermitian<T> {
        self.synthesize(&self.values)
    }

    /// `U diag(d) U*`.
    pub fn synthesize(&self, diag: &[T]) -> Hermitian<T> {
        assert_eq!(diag.len(), self.dim());
        let u = &self.vectors;
        let n = u.rows();
        let mut out = CMatrix::zeros(n, n);
        for (k, &d) in diag.iter().enumerate() {
            if d == T::zero() {
                continue;
            }
            for i in 0..n {
                let ui = u[(i, k)] * d;
                for j in 0..n {
                    out[(i, j)] += ui * u[(j, k)].conj();
                }
            }
        }
        Hermitian::symmetrize(&out)
    }

    pub fn vector(&self, k: usize) -> Vec<C<T>> {
        self.vectors.column(k)
    }

    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        *self.values.last().expect("nonempty spectrum")
    }

    /// Groups of indices whose consecutive eigenvalues differ by at most `gap_tol`.
    pub fn clusters(&self, gap_tol: T) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (k, &v) in self.values.iter().enumerate() {
            match out.last_mut() {
                Some(last) if v - self.values[*last.last().unwrap()] <= gap_tol => last.push(k),
                _ => out.push(vec![k]),
            }
        }
        out
    }

    /// Spectral projection onto the span of the eigenvectors `idx`.
    pub fn projection_onto(&self, idx: &[usize]) -> Hermitian<T> {
        let mut diag = vec![T::zero(); self.dim()];
        for &k in idx {
            diag[k] = T::one();
        }
        self.synthesize(&diag)
    }
}

/// Eigen-decomposition of a hermitian matrix.
///
/// Eigenvalues come back ascending; each eigenvector has its largest-modulus
/// component (first one on ties) made real positive. `tol` bounds the accepted
/// reconstruction residual relative to `‖a‖_F`.
pub fn eig_hermitian<T: Real>(a: &Hermitian<T>, tol: T) -> Result<SpectralDecomposition<T>> {
    let n = a.dim();
    let mut m = a.matrix().clone();
    let mut v = CMatrix::<T>::identity(n);
    let scale = a.frobenius();
    if n == 0 {
        return Ok(SpectralDecomposition { values: vec![], vectors: v });
    }
    let stop = T::lit(1e-12).max(T::solver_floor()) * scale;
    let tiny = T::epsilon() * T::epsilon() * scale;
    let mut converged = false;
    let mut extra = 0;
    for _sweep in 0..MAX_SWEEPS {
        let off = off_diagonal(&m);
        if off <= T::epsilon() * scale || off == T::zero() {
            converged = true;
            break;
        }
        if off <= stop {
            // a couple of sweeps past the contract threshold, then stop
            if extra >= 2 {
                converged = true;
                break;
            }
            extra += 1;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[(p, q)].norm() <= tiny {
                    continue;
                }
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal(&m) > stop {
        return Err(Error::NoConvergence(format!(
            "jacobi did not reach off-diagonal mass {stop} in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<T> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        fix_phase(&mut col);
        vectors.set_column(k, &col);
    }
    let dec = SpectralDecomposition { values, vectors };
    let resid = (dec.reconstruct().matrix() - a.matrix()).frobenius();
    if resid > tol.max(T::solver_floor() * T::from_usize_lossy(n)) * scale.max(T::one()) {
        return Err(Error::NoConvergence(format!(
            "eigen reconstruction residual {resid} exceeds tolerance"
        )));
    }
    Ok(dec)
}

fn off_diagonal<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `m[p][q]` with the unitary `G = diag(1, e^{-iφ}) · R(θ)` acting on
/// coordinates `(p, q)`, where `m[p][q] = r e^{iφ}`.
fn rotate<T: Real>(m: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let n = m.rows();
    let apq = m[(p, q)];
    let r = apq.norm();
    let phase = apq / r; // e^{iφ}
    let alpha = m[(p, p)].re;
    let beta = m[(q, q)].re;
    let theta = T::lit(0.5) * (T::lit(2.0) * r).atan2(beta - alpha);
    let (s, c) = theta.sin_cos();
    let ph = phase.conj(); // e^{-iφ}
    let g_pp = C::new(c, T::zero());
    let g_pq = C::new(s, T::zero());
    let g_qp = ph * (-s);
    let g_qq = ph * c;

    // m <- m G (columns)
    for i in 0..n {
        let mp = m[(i, p)];
        let mq = m[(i, q)];
        m[(i, p)] = mp * g_pp + mq * g_qp;
        m[(i, q)] = mp * g_pq + mq * g_qq;
    }
    // m <- G* m (rows)
    for j in 0..n {
        let mp = m[(p, j)];
        let mq = m[(q, j)];
        m[(p, j)] = g_pp.conj() * mp + g_qp.conj() * mq;
        m[(q, j)] = g_pq.conj() * mp + g_qq.conj() * mq;
    }
    m[(p, q)] = C::new(T::zero(), T::zero());
    m[(q, p)] = C::new(T::zero(), T::zero());
    m[(p, p)].im = T::zero();
    m[(q, q)].im = T::zero();
    for i in 0..n {
        let vp = v[(i, p)];
        let vq = v[(i, q)];
        v[(i, p)] = vp * g_pp + vq * g_qp;
        v[(i, q)] = vp * g_pq + vq * g_qq;
    }
}

/// Makes the largest-modulus component real positive; ties broken by lowest index.
pub(crate) fn fix_phase<T: Real>(col: &mut [C<T>]) {
    let mut best = 0;
    let mut best_mod = T::zero();
    let slack = T::one() + T::lit(1e-9).max(T::solver_floor());
    for (i, z) in col.iter().enumerate() {
        let m = z.norm();
        if m > best_mod * slack {
            best = i;
            best_mod = m;
        }
    }
    if best_mod == T::zero() {
        return;
    }
    let ph = col[best].conj() / best_mod;
    for z in col.iter_mut() {
        *z *= ph;
    }
    col[best].im = T::zero();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn diagonal_sorted_with_permutation_vectors() {
        let a = Hermitian::from_real_diag(&[3.0, 1.0, 2.0]);
        let e = eig_hermitian(&a, 1e-12).unwrap();
        assert!(close(e.values[0], 1.0) && close(e.values[1], 2.0) && close(e.values[2], 3.0));
        // eigenvector for 1 is e_2, for 2 is e_3, for 3 is e_1
        for (k, row) in [1usize, 2, 0].iter().enumerate() {
            assert!(close(e.vectors[(*row, k)].re, 1.0));
        }
    }

    #[test]
    fn identity_spectrum() {
        let e = eig_hermitian(&Hermitian::<f64>::identity(4), 1e-12).unwrap();
        assert!(e.values.iter().all(|&x| close(x, 1.0)));
    }

    #[test]
    fn pauli_x() {
        let a = Hermitian::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = eig_hermitian(&a, 1e-12).unwrap();
        assert!(close(e.values[0], -1.0) && close(e.values[1], 1.0));
        assert!((e.reconstruct().sub(&a)).frobenius() < 1e-13);
    }

    #[test]
    fn complex_entries_reconstruct() {
        let a = Hermitian::pauli(0.3, [0.2, -0.7, 0.4]);
        let e = eig_hermitian(&a, 1e-12).unwrap();
        let r = (0.04f64 + 0.49 + 0.16).sqrt();
        assert!(close(e.values[0], 0.3 - r) && close(e.values[1], 0.3 + r));
        assert!(e.reconstruct().sub(&a).frobenius() < 1e-13);
        for k in 0..2 {
            let col = e.vector(k);
            let big = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let lead = col.iter().find(|z| (z.norm() - big).abs() < 1e-12).unwrap();
            assert!(lead.im.abs() < 1e-15 && lead.re > 0.0);
        }
    }

    #[test]
    fn single_precision_variant() {
        let a = Hermitian::<f32>::pauli(1.0, [0.0, 0.0, 2.0]);
        let e = eig_hermitian(&a, 1e-5).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-6 && (e.values[1] - 3.0).abs() < 1e-6);
    }
}
