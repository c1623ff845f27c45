//! Orders induced by an isocone: the inner ordering on eigenvalue indices of
//! a non-derogatory member, and the order on states and pure states.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{BlockAlgebra, BlockElement};
use crate::error::{input, Error, Result};
use crate::herm::{eig_hermitian, eig_tol, CMatrix, Hermitian, SpectralDecomposition, C};
use crate::isocone::region::{norm3, V3};
use crate::isocone::{BlochRegion, ClassifiedIsocone, InnerCone, MembershipOracle};
use crate::poset::{up_sets, Poset, MAX_UPSET_SIZE};
use crate::random::random_hermitian;
use crate::scalar::Real;

/// A non-derogatory element with its ascending eigenbasis, eigenvector by
/// eigenvector located in its block.
#[derive(Clone, Debug)]
pub struct SpectralFrame<T> {
    element: BlockElement<T>,
    block_spectra: Vec<SpectralDecomposition<T>>,
    /// `(value, block, index within block)`, ascending in value.
    entries: Vec<(T, usize, usize)>,
}

impl<T: Real> SpectralFrame<T> {
    pub fn new(a: &BlockElement<T>, gap_tol: T) -> Result<Self> {
        let block_spectra = a.spectra()?;
        let mut entries: Vec<(T, usize, usize)> = block_spectra
            .iter()
            .enumerate()
            .flat_map(|(x, e)| e.values.iter().enumerate().map(move |(k, &v)| (v, x, k)))
            .collect();
        entries.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(std::cmp::Ordering::Equal));
        let scale = entries.iter().map(|e| e.0.abs()).fold(T::one(), T::max);
        let gaps: Vec<T> = entries.windows(2).map(|w| w[1].0 - w[0].0).collect();
        if let Some(i) = gaps.iter().position(|&g| g <= gap_tol * scale) {
            return Err(Error::Derogatory(format!(
                "eigenvalues {} and {} (indices {}, {}) are within {}; gaps: {:?}",
                entries[i].0,
                entries[i + 1].0,
                i + 1,
                i + 2,
                gap_tol * scale,
                gaps.iter().map(|g| g.to_f64_lossy()).collect::<Vec<_>>()
            )));
        }
        Ok(Self { element: a.clone(), block_spectra, entries })
    }

    pub fn from_hermitian(a: &Hermitian<T>, gap_tol: T) -> Result<Self> {
        Self::new(&BlockElement::single(a.clone()), gap_tol)
    }

    pub fn element(&self) -> &BlockElement<T> {
        &self.element
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        self.element.algebra()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Ascending eigenvalues `λ₁ < … < λ_N`.
    pub fn values(&self) -> Vec<T> {
        self.entries.iter().map(|e| e.0).collect()
    }

    /// Smallest gap between consecutive eigenvalues.
    pub fn min_gap(&self) -> T {
        self.entries.windows(2).map(|w| w[1].0 - w[0].0).fold(T::infinity(), T::min)
    }

    /// `φ_a⁻¹(χ_S)`: the spectral projection onto the eigenvectors with global index in `mask`.
    pub fn indicator(&self, mask: u32) -> BlockElement<T> {
        self.synthesize(|i| if mask >> i & 1 == 1 { T::one() } else { T::zero() })
    }

    /// `φ_a⁻¹(f)` for a function on the eigenvalue indices.
    pub fn synthesize(&self, f: impl Fn(usize) -> T) -> BlockElement<T> {
        let mut diags: Vec<Vec<T>> = self.block_spectra.iter().map(|e| vec![T::zero(); e.dim()]).collect();
        for (i, &(_, x, k)) in self.entries.iter().enumerate() {
            diags[x][k] = f(i);
        }
        let blocks = self.block_spectra.iter().zip(&diags).map(|(e, d)| e.synthesize(d)).collect();
        BlockElement::new(self.algebra(), blocks).expect("same algebra")
    }
}

/// The inner ordering `≤_a`: `i ≤ j` iff every accepted indicator containing `i` contains `j`.
pub fn inner_order<T: Real>(oracle: &dyn MembershipOracle<T>, frame: &SpectralFrame<T>, tol: T) -> Result<Poset> {
    let n = frame.len();
    if n > MAX_UPSET_SIZE {
        return Err(Error::Resource(format!("inner order enumerates 2^{n} indicators (max N = {MAX_UPSET_SIZE})")));
    }
    if !oracle.accepts(frame.element(), tol)? {
        return Err(input("the frame element is not in the cone"));
    }
    let accepted = accepted_indicators(oracle, frame, tol)?;
    order_from_accepted(n, &accepted)
}

fn accepted_indicators<T: Real>(oracle: &dyn MembershipOracle<T>, frame: &SpectralFrame<T>, tol: T) -> Result<Vec<u32>> {
    let n = frame.len();
    let mut out = Vec::new();
    for mask in 0..(1u32 << n) {
        if oracle.accepts(&frame.indicator(mask), tol)? {
            out.push(mask);
        }
    }
    Ok(out)
}

/// `i ≤ j` iff every accepted set containing `i` contains `j`.
pub(crate) fn order_from_accepted(n: usize, accepted: &[u32]) -> Result<Poset> {
    let mut leq = vec![true; n * n];
    for &s in accepted {
        for i in 0..n {
            if s >> i & 1 == 1 {
                for j in 0..n {
                    if s >> j & 1 == 0 {
                        leq[i * n + j] = false;
                    }
                }
            }
        }
    }
    Poset::from_matrix(n, leq).map_err(|e| Error::Inconsistent(format!("accepted indicators do not define a poset: {e}")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub base: Poset,
    pub radius: f64,
    pub trials: usize,
    /// Perturbations whose order equals the base order.
    pub agree: usize,
    /// Perturbations whose order is strictly coarser.
    pub coarser: usize,
    /// Perturbations whose order is finer or unrelated.
    pub other: usize,
    /// Trials where no inside, non-derogatory perturbation was found.
    pub inconclusive: usize,
}

impl StabilityReport {
    pub fn stable(&self) -> bool {
        self.agree == self.trials && self.inconclusive == 0
    }

    /// Changes, if any, only ever forget relations.
    pub fn degrades_only_coarser(&self) -> bool {
        self.other == 0
    }
}

/// Compares `≤_a′` with `≤_a` for random `a′` at Frobenius distance `radius` from `a`.
pub fn inner_order_stability<T: Real>(
    oracle: &dyn MembershipOracle<T>,
    frame: &SpectralFrame<T>,
    radius: T,
    trials: usize,
    seed: u64,
    tol: T,
) -> Result<StabilityReport> {
    let base = inner_order(oracle, frame, tol)?;
    let alg = frame.algebra().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gap_tol = T::lit(1e-9);
    let mut rep = StabilityReport {
        base: base.clone(),
        radius: radius.to_f64_lossy(),
        trials,
        agree: 0,
        coarser: 0,
        other: 0,
        inconclusive: 0,
    };
    for _ in 0..trials {
        let mut found = None;
        for _attempt in 0..20 {
            let a2 = frame.element().add(&random_direction(&alg, &mut rng).scale(radius));
            if !oracle.accepts(&a2, tol)? {
                continue;
            }
            if let Ok(f2) = SpectralFrame::new(&a2, gap_tol) {
                found = Some(f2);
                break;
            }
        }
        let Some(f2) = found else {
            rep.inconclusive += 1;
            continue;
        };
        let p = order_from_accepted(f2.len(), &accepted_indicators(oracle, &f2, tol)?)?;
        if p == base {
            rep.agree += 1;
        } else if p.is_coarser_or_equal(&base) {
            rep.coarser += 1;
        } else {
            rep.other += 1;
        }
    }
    Ok(rep)
}

fn random_direction<T: Real>(alg: &BlockAlgebra, rng: &mut dyn RngCore) -> BlockElement<T> {
    let blocks = alg.dims().iter().map(|&n| random_hermitian::<T, _>(rng, n)).collect();
    let e = BlockElement::new(alg, blocks).expect("dims");
    let f = e.frobenius();
    e.scale(f.recip())
}

/// Unit vector on one block, phase-normalized (first nonzero amplitude real positive).
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T> {
    block: usize,
    psi: Vec<C<T>>,
}

impl<T: Real> PureState<T> {
    pub fn new(block: usize, psi: Vec<C<T>>) -> Result<Self> {
        let n = psi.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if !(n > T::epsilon()) || !n.is_finite() {
            return Err(input("state vector must be nonzero and finite"));
        }
        let mut psi: Vec<C<T>> = psi.into_iter().map(|z| z / n).collect();
        let thresh = T::epsilon() * T::lit(64.0);
        if let Some(first) = psi.iter().copied().find(|z| z.norm() > thresh) {
            let phase = first.conj() / first.norm();
            psi.iter_mut().for_each(|z| *z *= phase);
        }
        Ok(Self { block, psi })
    }

    /// The pure state with Bloch vector `m` on an `M₂` block.
    pub fn from_bloch(block: usize, m: V3<T>) -> Result<Self> {
        let r = norm3(&m);
        if r <= T::epsilon() {
            return Err(input("Bloch vector must be nonzero"));
        }
        let (x, y, z) = (m[0] / r, m[1] / r, m[2] / r);
        let theta = z.max(-T::one()).min(T::one()).acos();
        let phi = y.atan2(x);
        let half = theta * T::lit(0.5);
        Self::new(block, vec![C::new(half.cos(), T::zero()), C::from_polar(half.sin(), phi)])
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn vector(&self) -> &[C<T>] {
        &self.psi
    }

    /// Bloch vector of a qubit state: `(2 Re ψ̄₀ψ₁, 2 Im ψ̄₀ψ₁, |ψ₀|² − |ψ₁|²)`.
    pub fn bloch_vector(&self) -> Option<V3<T>> {
        if self.psi.len() != 2 {
            return None;
        }
        let c = self.psi[0].conj() * self.psi[1];
        let two = T::lit(2.0);
        Some([two * c.re, two * c.im, self.psi[0].norm_sqr() - self.psi[1].norm_sqr()])
    }

    pub fn overlap(&self, other: &Self) -> T {
        if self.block != other.block || self.psi.len() != other.psi.len() {
            return T::zero();
        }
        self.psi.iter().zip(&other.psi).map(|(a, b)| a.conj() * b).sum::<C<T>>().norm()
    }

    pub fn density(&self, alg: &BlockAlgebra) -> Result<DensityMatrix<T>> {
        if self.block >= alg.blocks() || alg.dim(self.block) != self.psi.len() {
            return Err(input("pure state does not fit the algebra"));
        }
        let col = CMatrix::from_columns(self.psi.len(), std::slice::from_ref(&self.psi));
        let blocks = (0..alg.blocks())
            .map(|x| {
                if x == self.block {
                    Hermitian::symmetrize(&col.outer_self())
                } else {
                    Hermitian::zeros(alg.dim(x))
                }
            })
            .collect();
        Ok(DensityMatrix { rho: BlockElement::new(alg, blocks)? })
    }
}

/// Positive block element of total trace 1.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    rho: BlockElement<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(rho: BlockElement<T>, tol: T) -> Result<Self> {
        let tr: T = rho.blocks().iter().map(Hermitian::trace).sum();
        if (tr - T::one()).abs() > tol.max(T::lit(1e-12)) {
            return Err(input(format!("density matrix has trace {tr}, expected 1")));
        }
        let lo = rho.spectrum()?.first().map_or(T::zero(), |s| s.0);
        if lo < -tol.max(T::lit(1e-12)) {
            return Err(input(format!("density matrix has negative eigenvalue {lo}")));
        }
        Ok(Self { rho })
    }

    pub fn element(&self) -> &BlockElement<T> {
        &self.rho
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    Less,
    Greater,
    Equivalent,
    Incomparable,
}

impl Comparison {
    fn from_flags(le: bool, ge: bool) -> Self {
        match (le, ge) {
            (true, true) => Comparison::Equivalent,
            (true, false) => Comparison::Less,
            (false, true) => Comparison::Greater,
            (false, false) => Comparison::Incomparable,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Comparison::Less => Comparison::Greater,
            Comparison::Greater => Comparison::Less,
            c => c,
        }
    }
}

impl std::fmt::Display for Comparison {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Comparison::Less => "less",
            Comparison::Greater => "greater",
            Comparison::Equivalent => "equivalent",
            Comparison::Incomparable => "incomparable",
        })
    }
}

/// `min_{n∈K} d·n ≥ −tol`: a Bloch-vector difference `d` that is nonnegative on `I_K`.
pub fn m2_dual_cone_test<T: Real>(region: &BlochRegion<T>, d: &V3<T>, tol: T) -> bool {
    region.min_dot(d) >= -tol
}

pub fn pure_state_compare<T: Real>(cone: &ClassifiedIsocone<T>, phi: &PureState<T>, psi: &PureState<T>, tol: T) -> Result<Comparison> {
    let alg = cone.algebra();
    for s in [phi, psi] {
        if s.block >= alg.blocks() || alg.dim(s.block) != s.psi.len() {
            return Err(input("pure state does not fit the algebra"));
        }
    }
    let (x, y) = (phi.block, psi.block);
    if x != y {
        let p = cone.poset();
        return Ok(Comparison::from_flags(p.lt(x, y), p.lt(y, x)));
    }
    match cone.inner_cone(x) {
        InnerCone::Full { .. } => Ok(if (phi.overlap(psi) - T::one()).abs() <= tol.max(T::epsilon() * T::lit(64.0)) {
            Comparison::Equivalent
        } else {
            Comparison::Incomparable
        }),
        InnerCone::Region { region } => {
            let (m1, m2) = (phi.bloch_vector().expect("2-dim"), psi.bloch_vector().expect("2-dim"));
            let d = [m2[0] - m1[0], m2[1] - m1[1], m2[2] - m1[2]];
            let nd = [-d[0], -d[1], -d[2]];
            Ok(Comparison::from_flags(m2_dual_cone_test(region, &d, tol), m2_dual_cone_test(region, &nd, tol)))
        }
    }
}

/// Whether the traceless functional `ω` is nonnegative on the cone.
///
/// Members are generated by `ℝ·1` and the projections they contain. A
/// projection is in the cone iff its blocks equal to 1 form an up-set `F`
/// and every block that is neither 0 nor 1 sits just below `F` (all strict
/// successors in `F`) with a range allowed by its inner cone. So `ω ≥ 0` on
/// the cone iff every up-set `F` has `Σ_F tr ωₓ + Σ_x min(0, mₓ) ≥ −tol`,
/// with `mₓ` the least value of `ωₓ` on an admissible proper projection.
pub fn functional_nonnegative<T: Real>(cone: &ClassifiedIsocone<T>, omega: &BlockElement<T>, tol: T) -> Result<bool> {
    let k = cone.algebra().blocks();
    let traces: Vec<T> = omega.blocks().iter().map(Hermitian::trace).collect();
    let total: T = traces.iter().copied().sum();
    if total.abs() > tol {
        return Ok(false);
    }
    let mut m = vec![None; k];
    for x in 0..k {
        let b = omega.block(x);
        if b.dim() < 2 {
            continue;
        }
        m[x] = Some(match cone.inner_cone(x) {
            InnerCone::Full { .. } => {
                let e = eig_hermitian(b, eig_tol())?;
                let mut acc = T::zero();
                let mut best = T::infinity();
                for &v in &e.values[..e.dim() - 1] {
                    acc += v;
                    best = best.min(acc);
                }
                best
            }
            InnerCone::Region { region } => {
                let (c, w) = b.pauli_coords();
                c + region.min_dot(&w)
            }
        });
    }
    let family = up_sets(cone.poset())?;
    let p = cone.poset();
    for &f in &family.sets {
        let mut v: T = (0..k).filter(|&x| f >> x & 1 == 1).map(|x| traces[x]).sum();
        for x in 0..k {
            if f >> x & 1 == 0 && p.strict_up(x).iter().all(|&y| f >> y & 1 == 1) {
                if let Some(mx) = m[x] {
                    v += mx.min(T::zero());
                }
            }
        }
        if v < -tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `ρ ⪯ ρ′` iff `tr((ρ′−ρ)a) ≥ 0` for every member `a`; decided exactly on classified cones.
pub fn state_compare<T: Real>(cone: &ClassifiedIsocone<T>, rho: &DensityMatrix<T>, rho2: &DensityMatrix<T>, tol: T) -> Result<Comparison> {
    for r in [rho, rho2] {
        if r.rho.algebra() != cone.algebra() {
            return Err(input("density matrix does not live on the cone's algebra"));
        }
    }
    let d = rho2.rho.sub(&rho.rho);
    let le = functional_nonnegative(cone, &d, tol)?;
    let ge = functional_nonnegative(cone, &d.neg(), tol)?;
    Ok(Comparison::from_flags(le, ge))
}
