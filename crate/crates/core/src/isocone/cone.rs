use serde::{Deserialize, Serialize};

use super::region::BlochRegion;
use crate::algebra::{BlockAlgebra, BlockElement};
use crate::error::{input, Error, Result};
use crate::herm::{eig_hermitian, eig_tol, Hermitian};
use crate::poset::Poset;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Inside,
    Boundary,
    Outside,
}

impl Verdict {
    /// Accepted at the given tolerance (inside or within the boundary band).
    pub fn accepted(self) -> bool {
        self != Verdict::Outside
    }

    /// Decision from a signed margin against a tolerance band `[−tol, tol]`.
    pub fn from_margin<T: Real>(margin: T, tol: T) -> Self {
        if margin.is_nan() || margin < -tol {
            Verdict::Outside
        } else if margin <= tol {
            Verdict::Boundary
        } else {
            Verdict::Inside
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Inside => "inside",
            Verdict::Boundary => "boundary",
            Verdict::Outside => "outside",
        })
    }
}

/// A verdict with the smallest deciding margin (`+∞` when nothing constrains the element).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership<T> {
    pub verdict: Verdict,
    pub margin: T,
    /// The tolerance actually applied, after scaling by the element norm.
    pub tol: T,
}

/// Uniform decision interface for cones given by formulas, generators or black boxes.
pub trait MembershipOracle<T: Real>: Sync {
    fn algebra(&self) -> &BlockAlgebra;

    fn membership(&self, a: &BlockElement<T>, tol: T) -> Result<Membership<T>>;

    fn accepts(&self, a: &BlockElement<T>, tol: T) -> Result<bool> {
        Ok(self.membership(a, tol)?.verdict.accepted())
    }
}

pub(crate) fn check_algebra<T: Real>(expected: &BlockAlgebra, a: &BlockElement<T>) -> Result<()> {
    if a.algebra() != expected {
        return Err(input(format!(
            "element lives in blocks {:?}, cone in {:?}",
            a.algebra().dims(),
            expected.dims()
        )));
    }
    Ok(())
}

/// Tolerance scaled to the size of the element.
pub(crate) fn scaled_tol<T: Real>(tol: T, scale: T) -> T {
    tol * scale.abs().max(T::one())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InnerCone<T> {
    Full { dim: usize },
    Region { region: BlochRegion<T> },
}

impl<T: Real> InnerCone<T> {
    pub fn full(dim: usize) -> Self {
        InnerCone::Full { dim }
    }

    /// `I_K` on an `M₂` block; the whole sphere collapses to the full cone.
    pub fn region(region: BlochRegion<T>) -> Self {
        if region.is_sphere() {
            InnerCone::Full { dim: 2 }
        } else {
            InnerCone::Region { region }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            InnerCone::Full { dim } => *dim,
            InnerCone::Region { .. } => 2,
        }
    }

    pub fn is_full(&self) -> bool {
        matches!(self, InnerCone::Full { .. })
    }

    pub fn bloch_region(&self) -> Option<&BlochRegion<T>> {
        match self {
            InnerCone::Region { region } => Some(region),
            InnerCone::Full { .. } => None,
        }
    }

    /// Unscaled deciding margin of a block (`+∞` when unconstrained).
    fn margin(&self, b: &Hermitian<T>, tol: T) -> T {
        match self {
            InnerCone::Full { .. } => T::infinity(),
            InnerCone::Region { region } => {
                let (_, v) = b.pauli_coords();
                if super::region::norm3(&v) <= tol {
                    T::infinity()
                } else {
                    region.cone_margin(&v)
                }
            }
        }
    }
}

/// Membership of a 2×2 hermitian matrix in `I_K = ℝ₊K + ℝ1`.
pub fn m2_membership<T: Real>(region: &BlochRegion<T>, a: &Hermitian<T>, tol: T) -> Result<Membership<T>> {
    if a.dim() != 2 {
        return Err(Error::Dimension { expected: 2, found: a.dim() });
    }
    let tol = scaled_tol(tol, a.frobenius());
    let margin = InnerCone::region(region.clone()).margin(a, tol);
    Ok(Membership { verdict: Verdict::from_margin(margin, tol), margin, tol })
}

/// The normal form `⊞_{x∈P} I_x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedIsocone<T> {
    algebra: BlockAlgebra,
    poset: Poset,
    inner: Vec<InnerCone<T>>,
}

impl<T: Real> ClassifiedIsocone<T> {
    pub fn new(algebra: BlockAlgebra, poset: Poset, inner: Vec<InnerCone<T>>) -> Result<Self> {
        if poset.size() != algebra.blocks() {
            return Err(Error::Dimension { expected: algebra.blocks(), found: poset.size() });
        }
        if inner.len() != algebra.blocks() {
            return Err(Error::Dimension { expected: algebra.blocks(), found: inner.len() });
        }
        let inner = inner
            .into_iter()
            .enumerate()
            .map(|(x, c)| {
                let n = algebra.dim(x);
                match c {
                    InnerCone::Region { .. } if n != 2 => {
                        Err(input(format!("block {}: Bloch regions need a 2×2 block, found {n}", x + 1)))
                    }
                    InnerCone::Full { dim } if dim != n => Err(Error::Dimension { expected: n, found: dim }),
                    InnerCone::Region { region } => Ok(InnerCone::region(region)),
                    c => Ok(c),
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self { algebra, poset, inner })
    }

    /// `ℜ(A)` itself: antichain of full blocks.
    pub fn trivial(algebra: &BlockAlgebra) -> Self {
        let inner = algebra.dims().iter().map(|&n| InnerCone::full(n)).collect();
        Self { algebra: algebra.clone(), poset: Poset::antichain(algebra.blocks()), inner }
    }

    /// Single `M₂` block with cone `I_K`.
    pub fn m2(region: BlochRegion<T>) -> Self {
        Self {
            algebra: BlockAlgebra::matrix(2),
            poset: Poset::antichain(1),
            inner: vec![InnerCone::region(region)],
        }
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn inner(&self) -> &[InnerCone<T>] {
        &self.inner
    }

    pub fn inner_cone(&self, x: usize) -> &InnerCone<T> {
        &self.inner[x]
    }

    /// Single-block cone `I_x` of block `x`.
    pub fn component(&self, x: usize) -> Self {
        Self {
            algebra: BlockAlgebra::matrix(self.algebra.dim(x)),
            poset: Poset::antichain(1),
            inner: vec![self.inner[x].clone()],
        }
    }

    /// Every block carries the full cone and no two blocks are related.
    pub fn is_trivial(&self) -> bool {
        self.inner.iter().all(InnerCone::is_full) && self.poset.strict_pairs().is_empty()
    }

    fn membership_impl(&self, a: &BlockElement<T>, tol: T) -> Result<Membership<T>> {
        check_algebra(&self.algebra, a)?;
        let spectra: Vec<(T, T)> = a
            .blocks()
            .iter()
            .map(|b| {
                if b.dim() == 1 {
                    let v = b.get(0, 0).re;
                    Ok((v, v))
                } else {
                    eig_hermitian(b, eig_tol()).map(|e| (e.min(), e.max()))
                }
            })
            .collect::<Result<_>>()?;
        let scale = spectra.iter().map(|(lo, hi)| lo.abs().max(hi.abs())).fold(T::zero(), T::max);
        let tol = scaled_tol(tol, scale);
        let mut margin = T::infinity();
        for (x, c) in self.inner.iter().enumerate() {
            margin = margin.min(c.margin(a.block(x), tol));
        }
        for (x, y) in self.poset.strict_pairs() {
            margin = margin.min(spectra[y].0 - spectra[x].1);
        }
        Ok(Membership { verdict: Verdict::from_margin(margin, tol), margin, tol })
    }
}

impl<T: Real> MembershipOracle<T> for ClassifiedIsocone<T> {
    fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    fn membership(&self, a: &BlockElement<T>, tol: T) -> Result<Membership<T>> {
        self.membership_impl(a, tol)
    }
}

/// `⊞_{x∈P} I_x` from single-block parts.
pub fn lexicographic_sum_isocone<T: Real>(poset: &Poset, parts: &[ClassifiedIsocone<T>]) -> Result<ClassifiedIsocone<T>> {
    if parts.len() != poset.size() {
        return Err(Error::Dimension { expected: poset.size(), found: parts.len() });
    }
    if let Some(i) = parts.iter().position(|p| p.algebra.blocks() != 1) {
        return Err(input(format!("part {} has {} blocks; parts must be single-block", i + 1, parts[i].algebra.blocks())));
    }
    let dims = parts.iter().map(|p| p.algebra.dim(0)).collect();
    let inner = parts.iter().map(|p| p.inner[0].clone()).collect();
    ClassifiedIsocone::new(BlockAlgebra::new(dims)?, poset.clone(), inner)
}

/// `{a : σ(a) ⊂ ℝ₊} ∪ {−a : σ(a) ⊂ ℝ₊}`: closed under scaling and constants
/// but not under sums. Useful as a negative control for the axiom checker.
#[derive(Clone, Debug)]
pub struct SignedPsdSet {
    algebra: BlockAlgebra,
}

impl SignedPsdSet {
    pub fn new(algebra: BlockAlgebra) -> Self {
        Self { algebra }
    }
}

impl<T: Real> MembershipOracle<T> for SignedPsdSet {
    fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    fn membership(&self, a: &BlockElement<T>, tol: T) -> Result<Membership<T>> {
        check_algebra(&self.algebra, a)?;
        let spec = a.spectrum()?;
        let lo = spec.first().map_or(T::zero(), |s| s.0);
        let hi = spec.last().map_or(T::zero(), |s| s.0);
        let tol = scaled_tol(tol, lo.abs().max(hi.abs()));
        let margin = lo.max(-hi);
        Ok(Membership { verdict: Verdict::from_margin(margin, tol), margin, tol })
    }
}
