use rand::{Rng, RngCore};

use super::cone::{ClassifiedIsocone, InnerCone, MembershipOracle};
use crate::algebra::{BlockAlgebra, BlockElement};
use crate::herm::{eig_hermitian, eig_tol, Hermitian};
use crate::random::{random_hermitian, uniform};
use crate::scalar::Real;

/// Source of candidate elements for the axiom checker and verifiers.
pub trait ElementSampler<T: Real> {
    fn algebra(&self) -> &BlockAlgebra;
    fn sample(&self, rng: &mut dyn RngCore) -> BlockElement<T>;
}

/// Builds members of a classified cone directly: a random member of each
/// inner cone, shifted so every block sits above everything below it in the poset.
/// With probability `boundary_bias` a gap or Bloch angle is put exactly on the boundary.
#[derive(Clone, Debug)]
pub struct ClassifiedSampler<'a, T> {
    cone: &'a ClassifiedIsocone<T>,
    boundary_bias: f64,
}

impl<'a, T: Real> ClassifiedSampler<'a, T> {
    pub fn new(cone: &'a ClassifiedIsocone<T>) -> Self {
        Self { cone, boundary_bias: 0.25 }
    }

    pub fn with_boundary_bias(mut self, p: f64) -> Self {
        self.boundary_bias = p.clamp(0.0, 1.0);
        self
    }

    fn inner_member(&self, c: &InnerCone<T>, rng: &mut dyn RngCore) -> Hermitian<T> {
        let s: T = uniform(rng, 0.1, 3.0);
        match c {
            InnerCone::Full { dim: 1 } => Hermitian::scalar(1, T::zero()),
            InnerCone::Full { dim } => random_hermitian::<T, _>(rng, *dim).scale(s),
            InnerCone::Region { region } => {
                let d = if rng.random_bool(self.boundary_bias) {
                    region.sample_boundary(rng)
                } else {
                    region.sample_inside(rng)
                };
                Hermitian::pauli(T::zero(), [d[0] * s, d[1] * s, d[2] * s])
            }
        }
    }
}

impl<T: Real> ElementSampler<T> for ClassifiedSampler<'_, T> {
    fn algebra(&self) -> &BlockAlgebra {
        self.cone.algebra()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> BlockElement<T> {
        let poset = self.cone.poset();
        let k = poset.size();
        let mut blocks: Vec<Hermitian<T>> = Vec::with_capacity(k);
        let mut spread = Vec::with_capacity(k);
        for c in self.cone.inner() {
            let b = self.inner_member(c, rng);
            let (lo, hi) = match eig_hermitian(&b, eig_tol()) {
                Ok(e) => (e.min(), e.max()),
                Err(_) => (T::zero(), T::zero()),
            };
            blocks.push(b.add_scalar(-lo));
            spread.push(hi - lo);
        }
        // longest-chain offsets: every block starts above the top of all blocks below it
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&x| poset.strict_down(x).len());
        let mut floor = vec![T::zero(); k];
        let mut top = vec![T::zero(); k];
        for &x in &order {
            // independent base levels, otherwise incomparable minimal blocks move in lockstep
            if !rng.random_bool(self.boundary_bias) {
                floor[x] = uniform(rng, 0.0, 2.0);
            }
            for z in poset.strict_down(x) {
                let gap: T = if rng.random_bool(self.boundary_bias) { T::zero() } else { uniform(rng, 0.0, 2.0) };
                floor[x] = floor[x].max(top[z] + gap);
            }
            top[x] = floor[x] + spread[x];
        }
        let shift: T = uniform(rng, -5.0, 5.0);
        let scale: T = uniform(rng, 0.2, 4.0);
        let blocks = blocks
            .into_iter()
            .zip(&floor)
            .map(|(b, &f)| b.add_scalar(f + shift).scale(scale))
            .collect();
        BlockElement::new(self.cone.algebra(), blocks).expect("dimensions follow the cone")
    }
}

/// Gaussian blocks plus a random constant, kept only when the oracle accepts.
pub struct RejectionSampler<'a, T> {
    oracle: &'a dyn MembershipOracle<T>,
    tol: T,
    max_tries: usize,
}

impl<'a, T: Real> RejectionSampler<'a, T> {
    pub fn new(oracle: &'a dyn MembershipOracle<T>, tol: T) -> Self {
        Self { oracle, tol, max_tries: 200 }
    }
}

impl<T: Real> ElementSampler<T> for RejectionSampler<'_, T> {
    fn algebra(&self) -> &BlockAlgebra {
        self.oracle.algebra()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> BlockElement<T> {
        let alg = self.oracle.algebra();
        let mut last = BlockElement::zeros(alg);
        for _ in 0..self.max_tries {
            let c: T = uniform(rng, -4.0, 4.0);
            let blocks = alg.dims().iter().map(|&n| random_hermitian::<T, _>(rng, n).add_scalar(c)).collect();
            last = BlockElement::new(alg, blocks).expect("dims match");
            if self.oracle.accepts(&last, self.tol).unwrap_or(false) {
                break;
            }
        }
        last
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isocone::region::BlochRegion;
    use crate::poset::Poset;
    use rand::SeedableRng;

    #[test]
    fn classified_samples_are_members() {
        let alg = BlockAlgebra::new(vec![2, 1, 3, 2]).unwrap();
        let p = Poset::from_relations(4, &[(0, 1), (1, 2), (0, 3)]).unwrap();
        let inner = vec![
            InnerCone::region(BlochRegion::cap([1.0, 0.0, 0.0], 0.5).unwrap()),
            InnerCone::full(1),
            InnerCone::full(3),
            InnerCone::region(BlochRegion::polygon(vec![[0.0, 0.0, 1.0], [0.0, 1.0, 0.2]]).unwrap()),
        ];
        let cone = ClassifiedIsocone::<f64>::new(alg, p, inner).unwrap();
        let s = ClassifiedSampler::new(&cone);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let a = s.sample(&mut rng);
            assert!(cone.accepts(&a, 1e-9).unwrap());
        }
    }
}
