//! Random matrices and isotone functions used by samplers and tests.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::herm::{CMatrix, Extension, Hermitian, IsotoneFunction, C};
use crate::scalar::Real;

/// Independent sub-seed for stream `a`, item `b` (splitmix64 finalizer).
pub fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut z = base ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

pub fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> T {
    T::lit(rng.random_range(lo..hi))
}

/// Gaussian hermitian matrix (GUE up to scaling).
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Hermitian<T> {
    let m = CMatrix::from_fn(n, n, |_, _| C::new(normal(rng), normal(rng)));
    Hermitian::symmetrize(&m)
}

/// Haar-ish unitary from Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix<T> {
    loop {
        let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(n);
        let mut ok = true;
        for _ in 0..n {
            let mut v: Vec<C<T>> = (0..n).map(|_| C::new(normal(rng), normal(rng))).collect();
            for _pass in 0..2 {
                for c in &cols {
                    let d = crate::herm::matrix::dot(c, &v);
                    for (vi, ci) in v.iter_mut().zip(c) {
                        *vi -= *ci * d;
                    }
                }
            }
            let nv = crate::herm::matrix::norm(&v);
            if nv < T::lit(1e-6) {
                ok = false;
                break;
            }
            for vi in v.iter_mut() {
                *vi /= nv;
            }
            cols.push(v);
        }
        if ok {
            return CMatrix::from_columns(n, &cols);
        }
    }
}

/// Uniform unit 3-vector.
pub fn random_direction<T: Real, R: Rng + ?Sized>(rng: &mut R) -> [T; 3] {
    loop {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-9 {
            return [T::lit(v[0] / n), T::lit(v[1] / n), T::lit(v[2] / n)];
        }
    }
}

/// Piecewise-linear isotone function with 2–6 knots drawn in `[lo, hi]`,
/// sorted uniform values and constant extension.
pub fn random_isotone<T: Real, R: Rng + ?Sized>(rng: &mut R, lo: T, hi: T) -> IsotoneFunction<T> {
    let (lo, hi) = if hi - lo < T::lit(1e-6) {
        (lo - T::one(), hi + T::one())
    } else {
        (lo, hi)
    };
    let k = rng.random_range(2..=6usize);
    let span = hi - lo;
    loop {
        let mut knots: Vec<T> = (0..k).map(|_| lo + span * uniform::<T, _>(rng, 0.0, 1.0)).collect();
        knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if knots.windows(2).any(|w| w[1] - w[0] <= span * T::lit(1e-9)) {
            continue;
        }
        let scale: T = uniform(rng, 0.2, 3.0);
        let offset: T = uniform(rng, -2.0, 2.0);
        let mut values: Vec<T> = (0..k).map(|_| offset + scale * uniform::<T, _>(rng, 0.0, 1.0)).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return IsotoneFunction::new(knots, values, Extension::Constant).expect("valid isotone draw");
    }
}
