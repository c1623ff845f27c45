//! One-sided (Hestenes) Jacobi SVD. Singular values keep high relative
//! accuracy, which matters for small principal angles.

use super::matrix::{dot, norm, CMatrix, C};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct Svd<T> {
    /// Left singular vectors (rows × k); columns for zero singular values are zero.
    pub u: CMatrix<T>,
    /// Descending.
    pub s: Vec<T>,
    /// Right singular vectors (cols × k), unitary.
    pub v: CMatrix<T>,
}

pub fn svd<T: Real>(m: &CMatrix<T>) -> Svd<T> {
    let rows = m.rows();
    let k = m.cols();
    let mut cols: Vec<Vec<C<T>>> = (0..k).map(|j| m.column(j)).collect();
    let mut vcols: Vec<Vec<C<T>>> = (0..k)
        .map(|j| {
            let mut e = vec![C::new(T::zero(), T::zero()); k];
            e[j] = C::new(T::one(), T::zero());
            e
        })
        .collect();
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..k {
            for j in (i + 1)..k {
                let alpha: T = cols[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: T = cols[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma = dot(&cols[i], &cols[j]);
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let ph = gamma.conj() / g; // e^{-iφ}
                for z in cols[j].iter_mut() {
                    *z *= ph;
                }
                for z in vcols[j].iter_mut() {
                    *z *= ph;
                }
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for r in 0..rows {
                    let a = cols[i][r];
                    let b = cols[j][r];
                    cols[i][r] = a * c - b * s;
                    cols[j][r] = a * s + b * c;
                }
                for r in 0..k {
                    let a = vcols[i][r];
                    let b = vcols[j][r];
                    vcols[i][r] = a * c - b * s;
                    vcols[j][r] = a * s + b * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<(T, usize)> = cols.iter().enumerate().map(|(j, c)| (norm(c), j)).collect();
    sv.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut u = CMatrix::zeros(rows, k);
    let mut v = CMatrix::zeros(k, k);
    let mut s = Vec::with_capacity(k);
    for (pos, &(sigma, j)) in sv.iter().enumerate() {
        s.push(sigma);
        if sigma > T::zero() {
            let col: Vec<C<T>> = cols[j].iter().map(|&z| z / sigma).collect();
            u.set_column(pos, &col);
        }
        v.set_column(pos, &vcols[j]);
    }
    Svd { u, s, v }
}

/// Orthonormal basis of the column span (singular values above `tol`).
pub fn range_basis<T: Real>(m: &CMatrix<T>, tol: T) -> CMatrix<T> {
    let d = svd(m);
    let idx: Vec<usize> = (0..d.s.len()).filter(|&i| d.s[i] > tol).collect();
    d.u.columns(&idx)
}

/// Numerical rank with singular value threshold `tol`.
pub fn rank<T: Real>(m: &CMatrix<T>, tol: T) -> usize {
    svd(m).s.iter().filter(|&&x| x > tol).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_values_of_diagonal() {
        let m = CMatrix::<f64>::from_real_rows(&[vec![3.0, 0.0], vec![0.0, -4.0], vec![0.0, 0.0]]);
        let d = svd(&m);
        assert!((d.s[0] - 4.0).abs() < 1e-14 && (d.s[1] - 3.0).abs() < 1e-14);
        // U Σ V* = M
        let us = CMatrix::from_fn(3, 2, |i, j| d.u[(i, j)] * d.s[j]);
        assert!((&us.matmul(&d.v.adjoint()) - &m).frobenius() < 1e-13);
    }

    #[test]
    fn tiny_angle_resolved() {
        // columns e1 and cos θ e1 + sin θ e2 with θ = 1e-10
        let th = 1e-10f64;
        let m = CMatrix::from_real_rows(&[vec![1.0, th.cos()], vec![0.0, th.sin()]]);
        let d = svd(&m);
        // smallest singular value of [a b] for unit a,b is sqrt(1 - cos θ) ~ θ/√2
        let expect = (2.0f64).sqrt() * (th / 2.0).sin();
        assert!((d.s[1] - expect).abs() < 1e-18, "{} vs {}", d.s[1], expect);
        assert_eq!(rank(&m, 1e-12), 2);
        assert_eq!(rank(&m, 1e-8), 1);
    }
}
