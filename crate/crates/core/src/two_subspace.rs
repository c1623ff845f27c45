//! Canonical form of a pair of orthogonal projections, the spectrum of
//! their convex combinations, and the 16-element lattice they generate.

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::herm::{apply_function, eig_hermitian, eig_tol, proj_join, proj_meet, CMatrix, Hermitian, Projection};
use crate::poset::Poset;
use crate::scalar::Real;

/// Sine threshold separating intersection directions from generic ones.
pub const DEFAULT_ANGLE_TOL: f64 = 1e-8;

/// `ℂᴺ = (L∩N) ⊕ (L∩N⊥) ⊕ (L⊥∩N) ⊕ (L⊥∩N⊥) ⊕ L₀ ⊕ L₀′`, with
/// `p_N = [[1−H, W], [W, H]]` on `L₀ ⊕ L₀′` once `L₀′` is identified with `L₀` through `R`.
#[derive(Clone, Debug)]
pub struct HalmosData<T> {
    pub l_and_n: CMatrix<T>,
    pub l_and_nperp: CMatrix<T>,
    pub lperp_and_n: CMatrix<T>,
    pub lperp_and_nperp: CMatrix<T>,
    /// Orthonormal basis of `L₀`.
    pub l0: CMatrix<T>,
    /// Orthonormal basis of `L₀′`, ordered so that column `i` is `R⁻¹` of column `i` of `l0`.
    pub l0_prime: CMatrix<T>,
    pub h: Hermitian<T>,
    pub w: Hermitian<T>,
    /// `R` in the coordinates of the original `L₀′` basis: `R = l0 · r · l0_prime_raw*`.
    pub r: CMatrix<T>,
}

impl<T: Real> HalmosData<T> {
    pub fn dim(&self) -> usize {
        self.l0.rows()
    }

    pub fn generic_dim(&self) -> usize {
        self.l0.cols()
    }

    /// `R : L₀′ → L₀` as an `N×N` partial isometry.
    pub fn r_operator(&self) -> CMatrix<T> {
        self.l0.matmul(&self.l0_prime.adjoint())
    }

    /// Basis `[l0 | l0_prime]` of the generic part.
    pub fn generic_basis(&self) -> CMatrix<T> {
        self.l0.hstack(&self.l0_prime)
    }

    /// `p_L` and `p_N` rebuilt from the block formulas.
    pub fn reconstruct(&self) -> (Hermitian<T>, Hermitian<T>) {
        let n = self.dim();
        let d = self.generic_dim();
        let p_l = &(&self.l_and_n.outer_self() + &self.l_and_nperp.outer_self()) + &self.l0.outer_self();
        let mut block = CMatrix::zeros(2 * d, 2 * d);
        block.set_block(0, 0, &(&CMatrix::identity(d) - self.h.matrix()));
        block.set_block(0, d, self.w.matrix());
        block.set_block(d, 0, self.w.matrix());
        block.set_block(d, d, self.h.matrix());
        let g = self.generic_basis();
        let generic = if d == 0 { CMatrix::zeros(n, n) } else { g.matmul(&block).matmul(&g.adjoint()) };
        let p_n = &(&self.l_and_n.outer_self() + &self.lperp_and_n.outer_self()) + &generic;
        (Hermitian::symmetrize(&p_l), Hermitian::symmetrize(&p_n))
    }

    /// Frobenius errors of the two reconstructions.
    pub fn reconstruction_error(&self, p_l: &Projection<T>, p_n: &Projection<T>) -> (T, T) {
        let (a, b) = self.reconstruct();
        (a.sub(p_l.matrix()).frobenius(), b.sub(p_n.matrix()).frobenius())
    }

    /// Eigenvalues of `H`, ascending.
    pub fn h_spectrum(&self) -> Result<Vec<T>> {
        if self.generic_dim() == 0 {
            return Ok(Vec::new());
        }
        Ok(eig_hermitian(&self.h, eig_tol())?.values)
    }
}

/// Orthonormal basis of `range(p) ⊖ (parts)`, given that the parts are subspaces of `range(p)`.
fn remainder<T: Real>(p: &Projection<T>, parts: &[&CMatrix<T>]) -> Result<CMatrix<T>> {
    let mut m = p.matrix().clone();
    for b in parts {
        m = m.sub(&Hermitian::symmetrize(&b.outer_self()));
    }
    let e = eig_hermitian(&m, eig_tol())?;
    let idx: Vec<usize> = (0..e.dim()).filter(|&k| e.values[k] > T::lit(0.5)).collect();
    Ok(e.vectors.columns(&idx))
}

pub fn halmos_decompose<T: Real>(p_l: &Projection<T>, p_n: &Projection<T>, tol: T) -> Result<HalmosData<T>> {
    let n = p_l.dim();
    if p_n.dim() != n {
        return Err(Error::Dimension { expected: n, found: p_n.dim() });
    }
    let l_perp = p_l.complement();
    let n_perp = p_n.complement();
    let l_and_n = proj_meet(p_l, p_n, tol)?.basis().clone();
    let l_and_nperp = proj_meet(p_l, &n_perp, tol)?.basis().clone();
    let lperp_and_n = proj_meet(&l_perp, p_n, tol)?.basis().clone();
    let lperp_and_nperp = proj_meet(&l_perp, &n_perp, tol)?.basis().clone();
    let l0 = remainder(p_l, &[&l_and_n, &l_and_nperp])?;
    let l0p_raw = remainder(&l_perp, &[&lperp_and_n, &lperp_and_nperp])?;
    let d = l0.cols();
    if l0p_raw.cols() != d {
        return Err(Error::Inconsistent(format!(
            "generic parts have dimensions {d} and {}; loosen the angle tolerance",
            l0p_raw.cols()
        )));
    }
    if d == 0 {
        let empty = CMatrix::zeros(n, 0);
        return Ok(HalmosData {
            l_and_n,
            l_and_nperp,
            lperp_and_n,
            lperp_and_nperp,
            l0,
            l0_prime: empty,
            h: Hermitian::zeros(0),
            w: Hermitian::zeros(0),
            r: CMatrix::zeros(0, 0),
        });
    }
    let pn = p_n.matrix().matrix();
    let c = Hermitian::symmetrize(&l0.adjoint().matmul(pn).matmul(&l0));
    let h = Hermitian::identity(d).sub(&c);
    let x = l0.adjoint().matmul(pn).matmul(&l0p_raw);
    let w = apply_function(&h, |v| (v - v * v).max(T::zero()).sqrt())?;
    let w_inv = apply_function(&h, |v| {
        let s = (v - v * v).max(T::zero()).sqrt();
        if s > T::zero() { s.recip() } else { T::zero() }
    })?;
    let r = w_inv.matrix().matmul(&x);
    // columns of l0p_raw·r* pair with the columns of l0
    let l0_prime = l0p_raw.matmul(&r.adjoint());
    Ok(HalmosData { l_and_n, l_and_nperp, lperp_and_n, lperp_and_nperp, l0, l0_prime, h, w, r })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComboLabel {
    Zero,
    SMinus,
    T,
    OneMinusT,
    /// `t = ½`: the `t` and `1−t` groups merged.
    Half,
    SPlus,
    One,
}

#[derive(Clone, Debug)]
pub struct ComboGroup<T> {
    pub label: ComboLabel,
    pub values: Vec<T>,
    pub basis: CMatrix<T>,
}

#[derive(Clone, Debug)]
pub struct ComboSpectrum<T> {
    pub t: T,
    pub groups: Vec<ComboGroup<T>>,
}

impl<T: Real> ComboSpectrum<T> {
    pub fn group(&self, label: ComboLabel) -> Option<&ComboGroup<T>> {
        self.groups.iter().find(|g| g.label == label)
    }

    /// All eigenvalues, ascending.
    pub fn values(&self) -> Vec<T> {
        let mut v: Vec<T> = self.groups.iter().flat_map(|g| g.values.iter().copied()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        v
    }

    /// Strict chain `0 < S⁻ < min(t,1−t) ≤ max(t,1−t) < S⁺ < 1` on the realized values.
    pub fn chain_holds(&self, tol: T) -> bool {
        let lo = self.t.min(T::one() - self.t);
        let hi = self.t.max(T::one() - self.t);
        let all = |l: ComboLabel, f: &dyn Fn(T) -> bool| self.group(l).is_none_or(|g| g.values.iter().all(|&v| f(v)));
        all(ComboLabel::SMinus, &|v| v > tol && v < lo - tol)
            && all(ComboLabel::SPlus, &|v| v > hi + tol && v < T::one() - tol)
    }
}

/// Eigen-groups of `t·p_L + (1−t)·p_N` labelled by the canonical summands.
pub fn convex_combo_spectrum<T: Real>(p_l: &Projection<T>, p_n: &Projection<T>, t: T, tol: T) -> Result<ComboSpectrum<T>> {
    if !(t > T::zero() && t < T::one()) {
        return Err(Error::Domain(format!("t = {t} outside (0, 1)")));
    }
    let hd = halmos_decompose(p_l, p_n, tol)?;
    let half = (t - T::lit(0.5)).abs() <= T::epsilon() * T::lit(16.0);
    let mut groups = Vec::new();
    let mut push = |label, value: T, basis: &CMatrix<T>| {
        if basis.cols() > 0 {
            groups.push(ComboGroup { label, values: vec![value; basis.cols()], basis: basis.clone() });
        }
    };
    push(ComboLabel::Zero, T::zero(), &hd.lperp_and_nperp);
    if half {
        push(ComboLabel::Half, T::lit(0.5), &hd.l_and_nperp.hstack(&hd.lperp_and_n));
    } else {
        push(ComboLabel::T, t, &hd.l_and_nperp);
        push(ComboLabel::OneMinusT, T::one() - t, &hd.lperp_and_n);
    }
    push(ComboLabel::One, T::one(), &hd.l_and_n);
    let d = hd.generic_dim();
    if d > 0 {
        let s = T::one() - t;
        let mut m = CMatrix::zeros(2 * d, 2 * d);
        m.set_block(0, 0, &(&CMatrix::identity(d) - hd.h.scale(s).matrix()));
        m.set_block(0, d, hd.w.scale(s).matrix());
        m.set_block(d, 0, hd.w.scale(s).matrix());
        m.set_block(d, d, hd.h.scale(s).matrix());
        let e = eig_hermitian(&Hermitian::symmetrize(&m), eig_tol())?;
        let g = hd.generic_basis();
        // the generic block has exactly d eigenvalues on each side of ½
        let lower: Vec<usize> = (0..d).collect();
        let upper: Vec<usize> = (d..2 * d).collect();
        groups.push(ComboGroup {
            label: ComboLabel::SMinus,
            values: lower.iter().map(|&k| e.values[k]).collect(),
            basis: g.matmul(&e.vectors.columns(&lower)),
        });
        groups.push(ComboGroup {
            label: ComboLabel::SPlus,
            values: upper.iter().map(|&k| e.values[k]).collect(),
            basis: g.matmul(&e.vectors.columns(&upper)),
        });
    }
    let order = |l: &ComboLabel| match l {
        ComboLabel::Zero => 0,
        ComboLabel::SMinus => 1,
        ComboLabel::T | ComboLabel::Half => 2,
        ComboLabel::OneMinusT => 3,
        ComboLabel::SPlus => 4,
        ComboLabel::One => 5,
    };
    groups.sort_by_key(|g| order(&g.label));
    Ok(ComboSpectrum { t, groups })
}

#[derive(Clone, Debug)]
pub struct LatticeElement<T> {
    /// Bit `i` set when `Aᵢ₊₁` is included (A₁ = L∩N⊥, A₂ = L⊥∩N, A₃ = L₀, A₄ = N₀).
    pub subset: u8,
    pub projection: Projection<T>,
}

#[derive(Clone, Debug)]
pub struct Lattice16<T> {
    pub elements: Vec<LatticeElement<T>>,
    /// No two elements share a range.
    pub distinct: bool,
    /// `L₀⊕N₀ = W`, `N₀∩L₀′ = 0` and `N₀′⊕L₀ = W`.
    pub identities_hold: bool,
}

impl<T: Real> Lattice16<T> {
    pub fn element(&self, subset: u8) -> &Projection<T> {
        &self.elements[subset as usize].projection
    }

    /// Index of the element with the same range as `p`, if any.
    pub fn find(&self, p: &Projection<T>, tol: T) -> Option<u8> {
        self.elements.iter().find(|e| e.projection.same_range(p, tol)).map(|e| e.subset)
    }
}

/// `O + Σ_{i∈S} Aᵢ` for all sixteen subsets `S`.
pub fn generated_lattice16<T: Real>(p_l: &Projection<T>, p_n: &Projection<T>, tol: T) -> Result<Lattice16<T>> {
    let hd = halmos_decompose(p_l, p_n, tol)?;
    if hd.generic_dim() == 0 {
        return Err(Error::DegenerateLattice("the projections commute; use boolean combinations".into()));
    }
    let n0 = Projection::from_orthonormal(remainder(p_n, &[&hd.l_and_n, &hd.lperp_and_n])?);
    let n_perp = p_n.complement();
    let n_and_lperp_parts = [&hd.l_and_nperp, &hd.lperp_and_nperp];
    let n0_prime = Projection::from_orthonormal(remainder(&n_perp, &n_and_lperp_parts)?);
    let o = Projection::from_orthonormal(hd.l_and_n.clone());
    let atoms = [
        Projection::from_orthonormal(hd.l_and_nperp.clone()),
        Projection::from_orthonormal(hd.lperp_and_n.clone()),
        Projection::from_orthonormal(hd.l0.clone()),
        n0.clone(),
    ];
    let mut elements = Vec::with_capacity(16);
    for subset in 0u8..16 {
        let mut p = o.clone();
        for (i, a) in atoms.iter().enumerate() {
            if subset >> i & 1 == 1 {
                p = proj_join(&p, a, tol)?;
            }
        }
        elements.push(LatticeElement { subset, projection: p });
    }
    let dist_tol = T::lit(1e-6);
    let distinct = (0..16).all(|i| (i + 1..16).all(|j| !elements[i].projection.same_range(&elements[j].projection, dist_tol)));
    let l0 = Projection::from_orthonormal(hd.l0.clone());
    let l0p = Projection::from_orthonormal(hd.l0_prime.clone());
    let w_space = Projection::from_orthonormal(hd.generic_basis());
    let rank_tol = tol.max(T::lit(1e-8));
    let identities_hold = proj_join(&l0, &n0, rank_tol)?.same_range(&w_space, dist_tol)
        && proj_meet(&n0, &l0p, rank_tol)?.rank() == 0
        && proj_join(&n0_prime, &l0, rank_tol)?.same_range(&w_space, dist_tol)
        && l0.rank() + n0.rank() == w_space.rank();
    Ok(Lattice16 { elements, distinct, identities_hold })
}

/// Labels of the points of [`cororder_bound`], in index order.
pub const CORORDER_LABELS: [&str; 6] = ["0", "S-", "t", "1-t", "S+", "1"];
/// Labels of the points of [`cororder_bound_collapsed`].
pub const CORORDER_COLLAPSED_LABELS: [&str; 5] = ["0", "S-", "1/2", "S+", "1"];

/// The finest order an isocone can induce on the eigenvalue groups of
/// `t·p_L + (1−t)·p_N`: `0 ≺ S⁻ ≺ S⁺ ≺ 1` and `0 ≺ t, 1−t ≺ 1`, with
/// `t ∥ 1−t` and `t, 1−t ∥ S±`.
pub fn cororder_bound(t: f64) -> Result<Poset> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("t = {t} outside (0, 1)")));
    }
    if (t - 0.5).abs() <= f64::EPSILON * 16.0 {
        return Err(input("t = 1/2 merges t and 1−t; use cororder_bound_collapsed"));
    }
    Poset::from_relations(6, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 5), (3, 5), (4, 5)])
}

/// The `t = ½` variant: `0 ≺ S⁻ ≺ S⁺ ≺ 1` and `0 ≺ ½ ≺ 1`.
pub fn cororder_bound_collapsed() -> Poset {
    Poset::from_relations(5, &[(0, 1), (1, 3), (3, 4), (0, 2), (2, 4)]).expect("acyclic")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herm::C;

    fn proj_cols(n: usize, cols: &[&[f64]]) -> Projection<f64> {
        let cols: Vec<Vec<C<f64>>> = cols.iter().map(|c| c.iter().map(|&x| C::new(x, 0.0)).collect()).collect();
        Projection::onto_span(&CMatrix::from_columns(n, &cols), 1e-12)
    }

    fn diag_proj(d: &[f64]) -> Projection<f64> {
        Projection::new(Hermitian::from_real_diag(d), 1e-12).unwrap()
    }

    const TOL: f64 = DEFAULT_ANGLE_TOL;

    #[test]
    fn equal_projections() {
        let p = diag_proj(&[1.0, 0.0]);
        let hd = halmos_decompose(&p, &p, TOL).unwrap();
        assert_eq!(hd.l_and_n.cols(), 1);
        assert_eq!(hd.lperp_and_nperp.cols(), 1);
        assert_eq!(hd.generic_dim(), 0);
    }

    #[test]
    fn forty_five_degrees() {
        let s = 0.5f64.sqrt();
        let l = diag_proj(&[1.0, 0.0]);
        let n = proj_cols(2, &[&[s, s]]);
        let hd = halmos_decompose(&l, &n, TOL).unwrap();
        assert_eq!(hd.generic_dim(), 1);
        assert!((hd.h.get(0, 0).re - 0.5).abs() < 1e-12);
        let (el, en) = hd.reconstruction_error(&l, &n);
        assert!(el < 1e-12 && en < 1e-12);
    }

    #[test]
    fn commuting_three_dim() {
        let l = diag_proj(&[1.0, 1.0, 0.0]);
        let n = diag_proj(&[1.0, 0.0, 1.0]);
        let hd = halmos_decompose(&l, &n, TOL).unwrap();
        assert_eq!((hd.l_and_n.cols(), hd.l_and_nperp.cols(), hd.lperp_and_n.cols()), (1, 1, 1));
        assert_eq!(hd.lperp_and_nperp.cols(), 0);
        assert_eq!(hd.generic_dim(), 0);
        assert!(matches!(generated_lattice16(&l, &n, TOL), Err(Error::DegenerateLattice(_))));
    }

    #[test]
    fn combo_examples() {
        let s = 0.5f64.sqrt();
        let l = diag_proj(&[1.0, 0.0]);
        let n = proj_cols(2, &[&[s, s]]);
        let cs = convex_combo_spectrum(&l, &n, 0.5, TOL).unwrap();
        let sp = cs.group(ComboLabel::SPlus).unwrap().values[0];
        let sm = cs.group(ComboLabel::SMinus).unwrap().values[0];
        assert!((sp - (0.5 + 0.5 * s)).abs() < 1e-12);
        assert!((sm - (0.5 - 0.5 * s)).abs() < 1e-12);

        let a = diag_proj(&[1.0, 0.0]);
        let b = diag_proj(&[0.0, 1.0]);
        let cs = convex_combo_spectrum(&a, &b, 1.0 / 3.0, TOL).unwrap();
        assert_eq!(cs.group(ComboLabel::T).unwrap().values, vec![1.0 / 3.0]);
        assert!((cs.group(ComboLabel::OneMinusT).unwrap().values[0] - 2.0 / 3.0).abs() < 1e-15);

        let cs = convex_combo_spectrum(&a, &a, 0.3, TOL).unwrap();
        assert_eq!(cs.values(), vec![0.0, 1.0]);
        assert!(convex_combo_spectrum(&a, &a, 1.0, TOL).is_err());
    }

    #[test]
    fn combo_matches_direct_eigensolve() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let u = crate::random::random_unitary::<f64, _>(&mut rng, 5);
            let v = crate::random::random_unitary::<f64, _>(&mut rng, 5);
            let l = Projection::from_orthonormal(u.columns(&[0, 1]));
            let n = Projection::from_orthonormal(v.columns(&[0, 1, 2]));
            for t in [0.2, 0.5, 0.8] {
                let cs = convex_combo_spectrum(&l, &n, t, TOL).unwrap();
                let direct = eig_hermitian(&l.matrix().scale(t).add(&n.matrix().scale(1.0 - t)), 1e-12).unwrap();
                for (a, b) in cs.values().iter().zip(&direct.values) {
                    assert!((a - b).abs() < 1e-10);
                }
                assert!(cs.chain_holds(1e-9));
            }
        }
    }

    #[test]
    fn lattice_sixteen() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        // L = span(e₁, u), N = span(e₂, v) with u, v generic in span(e₃, e₄)... built by rotation
        let q = crate::random::random_unitary::<f64, _>(&mut rng, 4);
        let c = 0.6f64;
        let s = (1.0 - c * c).sqrt();
        let e = |v: [f64; 4]| -> Vec<C<f64>> {
            (0..4).map(|i| (0..4).map(|k| q[(i, k)] * v[k]).sum()).collect()
        };
        // L = span(e₀, e₂),  N = span(e₁, c e₂ + s e₃): A₁ = e₀, A₂ = e₁, generic pair (e₂ | c e₂ + s e₃)
        let l = Projection::onto_span(&CMatrix::from_columns(4, &[e([1.0, 0.0, 0.0, 0.0]), e([0.0, 0.0, 1.0, 0.0])]), 1e-12);
        let n = Projection::onto_span(&CMatrix::from_columns(4, &[e([0.0, 1.0, 0.0, 0.0]), e([0.0, 0.0, c, s])]), 1e-12);
        let lat = generated_lattice16(&l, &n, TOL).unwrap();
        assert!(lat.distinct);
        assert!(lat.identities_hold);
        assert_eq!(lat.element(0).rank(), 0);
        for sub in 0u8..16 {
            assert_eq!(lat.element(sub).rank(), sub.count_ones() as usize, "subset {sub:04b}");
        }
        assert!(lat.element(15).same_range(&proj_join(&l, &n, TOL).unwrap(), 1e-9));
    }

    #[test]
    fn cororder_shape() {
        let p = cororder_bound(1.0 / 3.0).unwrap();
        assert!(p.incomparable(2, 3));
        for x in [2, 3] {
            assert!(!p.leq(1, x));
            assert!(p.incomparable(1, x) && p.incomparable(4, x));
        }
        for x in 0..6 {
            assert!(p.leq(0, x) && p.leq(x, 5));
        }
        assert!(cororder_bound(0.5).is_err());
        let c = cororder_bound_collapsed();
        assert!(c.lt(1, 3) && c.incomparable(2, 1));
    }
}
