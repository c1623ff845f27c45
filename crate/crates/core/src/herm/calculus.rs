//! Continuous functional calculus and the operations built on it.

use serde::{Deserialize, Serialize};

use super::eig::eig_hermitian;
use super::hermitian::Hermitian;
use crate::error::{input, Error, Result};
use crate::scalar::Real;

/// Behaviour of an [`IsotoneFunction`] outside its knot range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extension {
    /// Constant continuation of the end values.
    Constant,
    /// Continue the first/last segment slopes.
    Linear,
}

/// Continuous nondecreasing piecewise-linear function on ℝ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotoneFunction<T> {
    knots: Vec<T>,
    values: Vec<T>,
    extension: Extension,
}

impl<T: Real> IsotoneFunction<T> {
    pub fn new(knots: Vec<T>, values: Vec<T>, extension: Extension) -> Result<Self> {
        if knots.is_empty() || knots.len() != values.len() {
            return Err(input("isotone function needs matching nonempty knots and values"));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(input("knots must be strictly ascending"));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(input("values must be nondecreasing"));
        }
        if knots.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(input("knots and values must be finite"));
        }
        Ok(Self { knots, values, extension })
    }

    pub fn identity() -> Self {
        Self::new(vec![T::zero(), T::one()], vec![T::zero(), T::one()], Extension::Linear)
            .expect("valid identity")
    }

    /// Clamp to `[lo, hi]`.
    pub fn clamp(lo: T, hi: T) -> Result<Self> {
        Self::new(vec![lo, hi], vec![lo, hi], Extension::Constant)
    }

    /// `0` below `lo`, `1` above `hi`, linear between: a continuous step.
    pub fn ramp(lo: T, hi: T) -> Result<Self> {
        Self::new(vec![lo, hi], vec![T::zero(), T::one()], Extension::Constant)
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn eval(&self, x: T) -> T {
        let k = &self.knots;
        let v = &self.values;
        let n = k.len();
        if n == 1 {
            return v[0];
        }
        if x <= k[0] {
            return match self.extension {
                Extension::Constant => v[0],
                Extension::Linear => v[0] - (k[0] - x) * (v[1] - v[0]) / (k[1] - k[0]),
            };
        }
        if x >= k[n - 1] {
            return match self.extension {
                Extension::Constant => v[n - 1],
                Extension::Linear => {
                    v[n - 1] + (x - k[n - 1]) * (v[n - 1] - v[n - 2]) / (k[n - 1] - k[n - 2])
                }
            };
        }
        let i = k.partition_point(|&t| t <= x) - 1;
        let w = (x - k[i]) / (k[i + 1] - k[i]);
        v[i] + w * (v[i + 1] - v[i])
    }
}

/// `f(a) = U diag(f(λ)) U*` for any real function; non-finite values of `f`
/// on the spectrum are a domain error.
pub fn apply_function<T: Real>(a: &Hermitian<T>, f: impl Fn(T) -> T) -> Result<Hermitian<T>> {
    let e = eig_hermitian(a, eig_tol::<T>())?;
    let mapped: Vec<T> = e.values.iter().map(|&x| f(x)).collect();
    if let Some(bad) = e.values.iter().zip(&mapped).find(|(_, y)| !y.is_finite()) {
        return Err(Error::Domain(format!("{}", bad.0)));
    }
    Ok(e.synthesize(&mapped))
}

pub fn apply_isotone<T: Real>(a: &Hermitian<T>, f: &IsotoneFunction<T>) -> Result<Hermitian<T>> {
    apply_function(a, |x| f.eval(x))
}

pub fn abs_op<T: Real>(a: &Hermitian<T>) -> Result<Hermitian<T>> {
    apply_function(a, T::abs)
}

fn check_dims<T: Real>(a: &Hermitian<T>, b: &Hermitian<T>) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension { expected: a.dim(), found: b.dim() });
    }
    Ok(())
}

/// `½(a + b + |a − b|)`.
pub fn join<T: Real>(a: &Hermitian<T>, b: &Hermitian<T>) -> Result<Hermitian<T>> {
    check_dims(a, b)?;
    let d = abs_op(&a.sub(b))?;
    Ok(a.add(b).add(&d).scale(T::lit(0.5)))
}

/// `½(a + b − |a − b|)`.
pub fn meet<T: Real>(a: &Hermitian<T>, b: &Hermitian<T>) -> Result<Hermitian<T>> {
    check_dims(a, b)?;
    let d = abs_op(&a.sub(b))?;
    Ok(a.add(b).sub(&d).scale(T::lit(0.5)))
}

/// True iff every consecutive eigenvalue gap exceeds `gap_tol`.
pub fn is_nonderogatory<T: Real>(a: &Hermitian<T>, gap_tol: T) -> Result<bool> {
    let e = eig_hermitian(a, eig_tol::<T>())?;
    Ok(e.values.windows(2).all(|w| w[1] - w[0] > gap_tol))
}

pub(crate) fn eig_tol<T: Real>() -> T {
    T::lit(1e-10).max(T::solver_floor() * T::lit(16.0))
}
