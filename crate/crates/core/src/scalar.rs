//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point type the library is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest relative threshold the iterative solvers can reach for this type.
    fn solver_floor() -> Self {
        Self::epsilon() * Self::lit(8.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Tolerance policy threaded through every module.
///
/// All comparisons use `abs * max(1, scale)` where `scale` is a norm of the
/// element under consideration.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ToleranceConfig<T> {
    /// Absolute tolerance for eigenvalue comparisons and membership margins.
    pub abs: T,
    /// Minimum eigenvalue gap for an element to count as non-derogatory.
    pub gap: T,
    /// Singular value threshold for rank decisions on subspaces.
    pub rank: T,
}

impl<T: Real> ToleranceConfig<T> {
    pub fn new(abs: T) -> Self {
        Self {
            abs,
            gap: abs,
            rank: T::lit(1e-8).max(abs),
        }
    }

    /// `abs` scaled by `max(1, scale)`.
    pub fn scaled(&self, scale: T) -> T {
        self.abs * scale.abs().max(T::one())
    }
}

impl<T: Real> Default for ToleranceConfig<T> {
    fn default() -> Self {
        // f32 cannot resolve 1e-9, fall back to a few ulps.
        let abs = T::lit(1e-9).max(T::epsilon() * T::lit(64.0));
        Self::new(abs)
    }
}
