//! Lawson–Hanson nonnegative least squares for small dense problems.

use crate::scalar::Real;

pub(crate) struct NnlsSolution<T> {
    pub x: Vec<T>,
    pub residual: T,
}

/// `min ‖A x − b‖` over `x ≥ 0`; `cols` are the columns of `A`.
pub(crate) fn nnls<T: Real>(cols: &[Vec<T>], b: &[T]) -> NnlsSolution<T> {
    let m = cols.len();
    let d = b.len();
    let mut x = vec![T::zero(); m];
    let mut passive = vec![false; m];
    let bn = norm(b);
    if m == 0 || bn == T::zero() {
        return NnlsSolution { x, residual: bn };
    }
    let col_scale = cols.iter().map(|c| norm(c)).fold(T::zero(), T::max);
    let wtol = T::lit(1e-13).max(T::epsilon() * T::lit(64.0)) * col_scale * bn;
    let mut banned = vec![false; m];
    let max_outer = 3 * m + 3 * d + 10;
    for _ in 0..max_outer {
        let r = residual_vec(cols, &x, b);
        let (mut best, mut j) = (wtol, None);
        for k in 0..m {
            if !passive[k] && !banned[k] {
                let w = dot(&cols[k], &r);
                if w > best {
                    best = w;
                    j = Some(k);
                }
            }
        }
        let Some(j) = j else { break };
        passive[j] = true;
        let mut progressed = false;
        for _ in 0..(m + 5) {
            let set: Vec<usize> = (0..m).filter(|&k| passive[k]).collect();
            let Some(z) = least_squares(cols, &set, b) else {
                // j made the passive columns dependent: drop it for this solve
                passive[j] = false;
                banned[j] = true;
                break;
            };
            if z.iter().all(|&v| v > T::zero()) {
                for (&k, &v) in set.iter().zip(&z) {
                    x[k] = v;
                }
                progressed = true;
                break;
            }
            let mut alpha = T::one();
            for (&k, &v) in set.iter().zip(&z) {
                if v <= T::zero() {
                    let den = x[k] - v;
                    if den > T::zero() {
                        alpha = alpha.min(x[k] / den);
                    }
                }
            }
            for (&k, &v) in set.iter().zip(&z) {
                x[k] = x[k] + alpha * (v - x[k]);
                if x[k] <= T::epsilon() * T::lit(16.0) * (T::one() + v.abs()) {
                    x[k] = T::zero();
                    passive[k] = false;
                }
            }
        }
        if progressed {
            banned.iter_mut().for_each(|v| *v = false);
        }
    }
    let residual = norm(&residual_vec(cols, &x, b));
    NnlsSolution { x, residual }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&u, &v)| u * v).sum()
}

fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

fn residual_vec<T: Real>(cols: &[Vec<T>], x: &[T], b: &[T]) -> Vec<T> {
    let mut r = b.to_vec();
    for (c, &w) in cols.iter().zip(x) {
        if w != T::zero() {
            for (ri, &ci) in r.iter_mut().zip(c) {
                *ri -= w * ci;
            }
        }
    }
    r
}

/// Unconstrained least squares on the columns `set` via modified Gram–Schmidt;
/// `None` if those columns are numerically dependent.
fn least_squares<T: Real>(cols: &[Vec<T>], set: &[usize], b: &[T]) -> Option<Vec<T>> {
    let k = set.len();
    let mut q: Vec<Vec<T>> = Vec::with_capacity(k);
    let mut r = vec![vec![T::zero(); k]; k];
    for (j, &c) in set.iter().enumerate() {
        let mut v = cols[c].clone();
        let n0 = norm(&v);
        for _pass in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let h = dot(qi, &v);
                r[i][j] += h;
                for (vt, &qt) in v.iter_mut().zip(qi) {
                    *vt -= h * qt;
                }
            }
        }
        let n = norm(&v);
        if n <= T::lit(1e-10) * n0 || n == T::zero() {
            return None;
        }
        r[j][j] = n;
        q.push(v.into_iter().map(|t| t / n).collect());
    }
    let qb: Vec<T> = q.iter().map(|qi| dot(qi, b)).collect();
    let mut z = vec![T::zero(); k];
    for i in (0..k).rev() {
        let mut s = qb[i];
        for j in i + 1..k {
            s -= r[i][j] * z[j];
        }
        z[i] = s / r[i][i];
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inside_positive_orthant() {
        let cols: Vec<Vec<f64>> = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let s = nnls(&cols, &[2.0, 3.0]);
        assert!(s.residual < 1e-14);
        assert!((s.x[0] - 2.0).abs() < 1e-14 && (s.x[1] - 3.0).abs() < 1e-14);
        let s = nnls(&cols, &[-1.0, 3.0]);
        assert!((s.residual - 1.0).abs() < 1e-14);
        assert_eq!(s.x[0], 0.0);
    }

    #[test]
    fn redundant_columns() {
        let cols: Vec<Vec<f64>> = vec![vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]];
        let s = nnls(&cols, &[1.0, 2.0, 0.0]);
        assert!(s.residual < 1e-12);
        let s = nnls(&cols, &[1.0, 2.0, 1.0]);
        assert!((s.residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force_on_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let cols: Vec<Vec<f64>> = (0..3).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
            let b: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let s = nnls(&cols, &b);
            // brute force over all supports
            let mut best = norm(&b);
            for mask in 1u32..8 {
                let set: Vec<usize> = (0..3).filter(|&k| mask >> k & 1 == 1).collect();
                if let Some(z) = least_squares(&cols, &set, &b) {
                    if z.iter().all(|&v| v >= 0.0) {
                        let mut x = vec![0.0; 3];
                        for (&k, &v) in set.iter().zip(&z) {
                            x[k] = v;
                        }
                        best = best.min(norm(&residual_vec(&cols, &x, &b)));
                    }
                }
            }
            assert!((s.residual - best).abs() < 1e-10, "{} vs {}", s.residual, best);
        }
    }
}
