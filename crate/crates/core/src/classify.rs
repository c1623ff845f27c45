//! Recovers the normal form `⊞_{x∈P} I_x` of a cone known only through a
//! membership oracle, and compares candidate normal forms against an oracle.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{BlockAlgebra, BlockElement, ElementRecord};
use crate::error::{Error, Result};
use crate::herm::Hermitian;
use crate::isocone::region::V3;
use crate::isocone::{BlochRegion, ClassifiedIsocone, ClassifiedSampler, ElementSampler, InnerCone, MembershipOracle};
use crate::order_maps::order_from_accepted;
use crate::poset::{Poset, MAX_UPSET_SIZE};
use crate::random::{random_hermitian, uniform};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ClassifyConfig<T> {
    pub trials: usize,
    pub seed: u64,
    pub tol: T,
    /// Number of Bloch directions probed per `M₂` block.
    pub grid: usize,
}

impl<T: Real> Default for ClassifyConfig<T> {
    fn default() -> Self {
        Self { trials: 500, seed: 0, tol: T::lit(1e-9), grid: 2562 }
    }
}

/// `n` nearly uniform unit vectors (golden-angle spiral).
pub fn fibonacci_sphere<T: Real>(n: usize) -> Vec<V3<T>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [T::lit(r * phi.cos()), T::lit(r * phi.sin()), T::lit(z)]
        })
        .collect()
}

/// Typical spacing of an `n`-point sphere grid, `√(4π/n)`.
pub fn grid_resolution(n: usize) -> f64 {
    (4.0 * std::f64::consts::PI / n.max(1) as f64).sqrt()
}

fn block_pattern<T: Real>(alg: &BlockAlgebra, mask: u32) -> BlockElement<T> {
    let c: Vec<T> = (0..alg.blocks()).map(|x| if mask >> x & 1 == 1 { T::one() } else { T::zero() }).collect();
    BlockElement::from_block_scalars(alg, &c)
}

/// Accepted 0/1 block-scalar patterns `Σ_{x∈S} ιₓ`.
pub fn accepted_patterns<T: Real>(oracle: &dyn MembershipOracle<T>, tol: T) -> Result<Vec<u32>> {
    let alg = oracle.algebra();
    let k = alg.blocks();
    if k > MAX_UPSET_SIZE {
        return Err(Error::Resource(format!("pattern enumeration limited to {MAX_UPSET_SIZE} blocks, got {k}")));
    }
    let mut out = Vec::new();
    for mask in 0..(1u32 << k) {
        if oracle.accepts(&block_pattern(alg, mask), tol)? {
            out.push(mask);
        }
    }
    Ok(out)
}

/// Nonnegative combinations of accepted patterns, plus a constant and a
/// shrinking random perturbation that is kept only if the oracle accepts it.
pub struct PatternSampler<'a, T> {
    oracle: &'a dyn MembershipOracle<T>,
    patterns: Vec<u32>,
    tol: T,
}

impl<'a, T: Real> PatternSampler<'a, T> {
    pub fn new(oracle: &'a dyn MembershipOracle<T>, tol: T) -> Result<Self> {
        let patterns = accepted_patterns(oracle, tol)?;
        Ok(Self { oracle, patterns, tol })
    }
}

impl<T: Real> ElementSampler<T> for PatternSampler<'_, T> {
    fn algebra(&self) -> &BlockAlgebra {
        self.oracle.algebra()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> BlockElement<T> {
        let alg = self.oracle.algebra();
        let mut a = BlockElement::scalar(alg, uniform(rng, -2.0, 2.0));
        for _ in 0..rng.random_range(1..=3usize) {
            if self.patterns.is_empty() {
                break;
            }
            let s = self.patterns[rng.random_range(0..self.patterns.len())];
            a = a.add(&block_pattern(alg, s).scale(uniform(rng, 0.1, 2.0)));
        }
        let blocks = alg.dims().iter().map(|&n| random_hermitian::<T, _>(rng, n)).collect();
        let noise = BlockElement::new(alg, blocks).expect("dims");
        let mut eps: T = uniform(rng, 0.0, 0.5);
        for _ in 0..8 {
            let b = a.add(&noise.scale(eps));
            if self.oracle.accepts(&b, self.tol).unwrap_or(false) {
                return b;
            }
            eps *= T::lit(0.25);
        }
        a
    }
}

/// Recovers the block poset: `x ≤ y` iff every accepted block-indicator
/// pattern containing `x` contains `y`. Sampled inside elements must then
/// satisfy `max σ(aₓ) ≤ min σ(a_y)` on every recovered relation.
pub fn recover_poset<T: Real>(oracle: &dyn MembershipOracle<T>, cfg: &ClassifyConfig<T>) -> Result<Poset> {
    let alg = oracle.algebra().clone();
    let k = alg.blocks();
    let patterns = accepted_patterns(oracle, cfg.tol)?;
    if !patterns.contains(&0) || !patterns.contains(&((1u32 << k) - 1)) {
        return Err(Error::Inconsistent("constants 0 and 1 must be members".into()));
    }
    let poset = order_from_accepted(k, &patterns)
        .map_err(|e| Error::Ambiguity(format!("block patterns do not define a poset: {e}")))?;
    let sampler = PatternSampler { oracle, patterns, tol: cfg.tol };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pairs = poset.strict_pairs();
    for trial in 0..cfg.trials {
        let a = sampler.sample(&mut rng);
        if !oracle.accepts(&a, cfg.tol)? {
            continue;
        }
        let spectra = a.spectra()?;
        let scale = a.spectral_norm()?.max(T::one());
        for &(x, y) in &pairs {
            let (hi, lo) = (spectra[x].max(), spectra[y].min());
            if hi > lo + cfg.tol * scale {
                return Err(Error::Ambiguity(format!(
                    "patterns give block {} ≤ block {} but accepted sample #{trial} has max σ = {hi} > min σ = {lo}: {}",
                    x + 1,
                    y + 1,
                    serde_json::to_string(&a.to_record()).unwrap_or_default()
                )));
            }
        }
    }
    Ok(poset)
}

/// Probe for Bloch direction `d` on block `x`: `d·σ` there, `−2`/`+2` on blocks
/// below/above `x`, `0` on blocks incomparable to it.
pub fn bloch_probe<T: Real>(alg: &BlockAlgebra, poset: &Poset, x: usize, d: &V3<T>) -> BlockElement<T> {
    let two = T::lit(2.0);
    let blocks = (0..alg.blocks())
        .map(|z| {
            let n = alg.dim(z);
            if z == x {
                Hermitian::pauli(T::zero(), *d)
            } else if poset.lt(z, x) {
                Hermitian::scalar(n, -two)
            } else if poset.lt(x, z) {
                Hermitian::scalar(n, two)
            } else {
                Hermitian::zeros(n)
            }
        })
        .collect();
    BlockElement::new(alg, blocks).expect("dims")
}

/// Recovered inner cone of one block.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InnerFit<T> {
    pub cone: InnerCone<T>,
    /// Accepted Bloch directions (empty unless the block is `M₂`).
    pub accepted: Vec<V3<T>>,
    pub probed: usize,
}

pub fn recover_inner<T: Real>(oracle: &dyn MembershipOracle<T>, poset: &Poset, x: usize, cfg: &ClassifyConfig<T>) -> Result<InnerFit<T>> {
    let alg = oracle.algebra();
    if x >= alg.blocks() {
        return Err(Error::Input(format!("block index {} out of range", x + 1)));
    }
    let n = alg.dim(x);
    if n != 2 {
        return Ok(InnerFit { cone: InnerCone::full(n), accepted: Vec::new(), probed: 0 });
    }
    let grid = fibonacci_sphere::<T>(cfg.grid);
    let mut accepted = Vec::new();
    for d in &grid {
        if oracle.accepts(&bloch_probe(alg, poset, x, d), cfg.tol)? {
            accepted.push(*d);
        }
    }
    if accepted.is_empty() {
        return Err(Error::Inconsistent(format!("no Bloch direction accepted on block {}", x + 1)));
    }
    let cone = if accepted.len() == grid.len() {
        InnerCone::full(2)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
        let region = BlochRegion::enclosing_cap(&accepted, &mut rng).expect("nonempty");
        InnerCone::region(region)
    };
    Ok(InnerFit { cone, accepted, probed: grid.len() })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassificationResult<T> {
    pub poset: Poset,
    pub inner: Vec<InnerFit<T>>,
    pub dims: Vec<usize>,
}

impl<T: Real> ClassificationResult<T> {
    pub fn to_cone(&self) -> Result<ClassifiedIsocone<T>> {
        ClassifiedIsocone::new(
            BlockAlgebra::new(self.dims.clone())?,
            self.poset.clone(),
            self.inner.iter().map(|f| f.cone.clone()).collect(),
        )
    }
}

pub fn classify<T: Real>(oracle: &dyn MembershipOracle<T>, cfg: &ClassifyConfig<T>) -> Result<ClassificationResult<T>> {
    let poset = recover_poset(oracle, cfg)?;
    let inner = (0..oracle.algebra().blocks())
        .map(|x| recover_inner(oracle, &poset, x, cfg))
        .collect::<Result<_>>()?;
    Ok(ClassificationResult { poset, inner, dims: oracle.algebra().dims().to_vec() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub element: ElementRecord,
    pub oracle_accepts: bool,
    pub candidate_accepts: bool,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub compared: usize,
    pub agreed: usize,
    pub exhaustive_patterns: usize,
    pub witnesses: Vec<Disagreement>,
}

impl AgreementReport {
    pub fn agreement(&self) -> f64 {
        if self.compared == 0 {
            1.0
        } else {
            self.agreed as f64 / self.compared as f64
        }
    }

    pub fn full_agreement(&self) -> bool {
        self.agreed == self.compared
    }
}

const MAX_WITNESSES: usize = 8;

/// Two-sided membership comparison between an oracle and a candidate normal form.
pub fn verify_classification<T: Real>(
    oracle: &dyn MembershipOracle<T>,
    candidate: &ClassifiedIsocone<T>,
    cfg: &ClassifyConfig<T>,
) -> Result<AgreementReport> {
    let alg = oracle.algebra().clone();
    if candidate.algebra() != &alg {
        return Err(Error::Input("candidate and oracle live in different algebras".into()));
    }
    let tol = cfg.tol;
    let mut rep = AgreementReport { compared: 0, agreed: 0, exhaustive_patterns: 0, witnesses: Vec::new() };
    let compare = |a: &BlockElement<T>, source: &str, rep: &mut AgreementReport| -> Result<()> {
        let o = oracle.accepts(a, tol)?;
        let c = candidate.accepts(a, tol)?;
        rep.compared += 1;
        if o == c {
            rep.agreed += 1;
        } else if rep.witnesses.len() < MAX_WITNESSES {
            rep.witnesses.push(Disagreement {
                element: a.to_record(),
                oracle_accepts: o,
                candidate_accepts: c,
                source: source.to_owned(),
            });
        }
        Ok(())
    };

    if alg.total() <= 12 && alg.blocks() <= MAX_UPSET_SIZE {
        for mask in 0..(1u32 << alg.blocks()) {
            compare(&block_pattern(&alg, mask), "block pattern", &mut rep)?;
            rep.exhaustive_patterns += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let interior = ClassifiedSampler::new(candidate).with_boundary_bias(0.0);
    let boundary = ClassifiedSampler::new(candidate).with_boundary_bias(0.9);
    let patterns = PatternSampler::new(oracle, tol)?;
    for _ in 0..cfg.trials {
        let a = interior.sample(&mut rng);
        compare(&a, "candidate interior sample", &mut rep)?;
        let b = boundary.sample(&mut rng);
        compare(&b, "candidate boundary sample", &mut rep)?;
        let blocks = alg.dims().iter().map(|&n| random_hermitian::<T, _>(&mut rng, n)).collect();
        let noise = BlockElement::new(&alg, blocks)?;
        let eps: T = uniform(&mut rng, 0.001, 0.2);
        compare(&b.add(&noise.scale(eps * b.spectral_norm()?.max(T::one()))), "perturbed boundary sample", &mut rep)?;
        compare(&patterns.sample(&mut rng), "oracle pattern sample", &mut rep)?;
    }

    // Bloch directions on M₂ blocks, padded by the candidate poset
    let grid = fibonacci_sphere::<T>(cfg.grid.min(4 * cfg.trials.max(1)));
    for x in (0..alg.blocks()).filter(|&x| alg.dim(x) == 2) {
        for d in &grid {
            compare(&bloch_probe(&alg, candidate.poset(), x, d), "Bloch direction probe", &mut rep)?;
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isocone::lexicographic_sum_isocone;
    use std::f64::consts::FRAC_PI_4;

    fn scalar_parts(k: usize) -> Vec<ClassifiedIsocone<f64>> {
        vec![ClassifiedIsocone::trivial(&BlockAlgebra::matrix(1)); k]
    }

    fn cfg() -> ClassifyConfig<f64> {
        ClassifyConfig { trials: 200, ..Default::default() }
    }

    #[test]
    fn recovers_chain_and_antichain() {
        let chain = lexicographic_sum_isocone(&Poset::chain(3), &scalar_parts(3)).unwrap();
        assert_eq!(recover_poset(&chain, &cfg()).unwrap(), Poset::chain(3));
        let anti = lexicographic_sum_isocone(&Poset::antichain(3), &scalar_parts(3)).unwrap();
        assert_eq!(recover_poset(&anti, &cfg()).unwrap(), Poset::antichain(3));
    }

    #[test]
    fn recovers_four_point_poset() {
        let p = Poset::from_relations(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let cone = lexicographic_sum_isocone(&p, &scalar_parts(4)).unwrap();
        assert_eq!(recover_poset(&cone, &cfg()).unwrap(), p);
    }

    #[test]
    fn inner_recovery() {
        let full = ClassifiedIsocone::<f64>::trivial(&BlockAlgebra::matrix(3));
        let fit = recover_inner(&full, &Poset::antichain(1), 0, &cfg()).unwrap();
        assert!(fit.cone.is_full());

        let cap = ClassifiedIsocone::m2(BlochRegion::cap([0.0, 0.0, 1.0], FRAC_PI_4).unwrap());
        let fit = recover_inner(&cap, &Poset::antichain(1), 0, &cfg()).unwrap();
        let Some(BlochRegion::Cap { center, angle }) = fit.cone.bloch_region().cloned() else { panic!() };
        let res = grid_resolution(2562);
        assert!((angle - FRAC_PI_4).abs() <= res, "angle {angle}");
        assert!(center[2] > (res).cos());
        for d in &fit.accepted {
            assert!(d[2] >= FRAC_PI_4.cos() - 1e-9);
        }

        let m2full = ClassifiedIsocone::<f64>::trivial(&BlockAlgebra::matrix(2));
        assert!(recover_inner(&m2full, &Poset::antichain(1), 0, &cfg()).unwrap().cone.is_full());
    }

    #[test]
    fn verification_examples() {
        let alg = BlockAlgebra::new(vec![1, 2]).unwrap();
        let truth = ClassifiedIsocone::new(
            alg.clone(),
            Poset::antichain(2),
            vec![InnerCone::full(1), InnerCone::region(BlochRegion::cap([0.0, 0.0, 1.0], 0.8).unwrap())],
        )
        .unwrap();
        let c = ClassifyConfig { trials: 100, grid: 400, ..Default::default() };
        assert!(verify_classification(&truth, &truth, &c).unwrap().full_agreement());

        let extra = ClassifiedIsocone::new(alg.clone(), Poset::chain(2), truth.inner().to_vec()).unwrap();
        let rep = verify_classification(&truth, &extra, &c).unwrap();
        assert!(!rep.witnesses.is_empty());
        let w: BlockElement<f64> = rep.witnesses[0].element.to_element(1e-12).unwrap();
        let spectra = w.spectra().unwrap();
        assert!(spectra[0].max() > spectra[1].min(), "witness must violate the extra relation");

        let shrunk = ClassifiedIsocone::new(
            alg,
            Poset::antichain(2),
            vec![InnerCone::full(1), InnerCone::region(BlochRegion::cap([0.0, 0.0, 1.0], 0.5).unwrap())],
        )
        .unwrap();
        let rep = verify_classification(&truth, &shrunk, &c).unwrap();
        let annulus = rep.witnesses.iter().any(|w| {
            let e: BlockElement<f64> = w.element.to_element(1e-12).unwrap();
            let (_, v) = e.block(1).pauli_coords();
            let ang = crate::isocone::region::angle3(&v, &[0.0, 0.0, 1.0]);
            w.oracle_accepts && !w.candidate_accepts && ang > 0.5 && ang <= 0.8 + 1e-9
        });
        assert!(annulus, "{:?}", rep.witnesses.iter().map(|w| &w.source).collect::<Vec<_>>());
    }

    #[test]
    fn full_classification_round_trip() {
        let alg = BlockAlgebra::new(vec![2, 1, 3]).unwrap();
        let truth = ClassifiedIsocone::new(
            alg,
            Poset::from_relations(3, &[(1, 0), (1, 2)]).unwrap(),
            vec![
                InnerCone::region(BlochRegion::cap([1.0, 0.0, 0.0], 0.6).unwrap()),
                InnerCone::full(1),
                InnerCone::full(3),
            ],
        )
        .unwrap();
        let res = classify(&truth, &ClassifyConfig { trials: 100, grid: 1000, ..Default::default() }).unwrap();
        assert_eq!(&res.poset, truth.poset());
        assert!(res.inner[1].cone.is_full() && res.inner[2].cone.is_full());
        let Some(&BlochRegion::Cap { angle, .. }) = res.inner[0].cone.bloch_region() else { panic!() };
        assert!((angle - 0.6f64).abs() < 2.0 * grid_resolution(1000));
    }
}
