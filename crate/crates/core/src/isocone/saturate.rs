//! Grows a generator set under the cone operations and isotone calculus,
//! tracking span dimension and whether the cone has become all of `Herm(N)`.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cone::{check_algebra, scaled_tol, Membership, MembershipOracle, Verdict};
use super::layer_cake::layer_cake;
use super::nnls::nnls;
use super::sampler::ElementSampler;
use crate::algebra::{BlockAlgebra, BlockElement};
use crate::error::{input, Result};
use crate::herm::{eig_hermitian, eig_tol, proj_join, proj_meet, svd::svd, CMatrix, Hermitian, Projection, C};
use crate::random::{random_isotone, uniform};
use crate::scalar::Real;

/// `cone(G) + ℝ·1` on `M_N`, decided by nonnegative least squares.
#[derive(Clone, Debug)]
pub struct GeneratorCone<T> {
    algebra: BlockAlgebra,
    generators: Vec<Hermitian<T>>,
    /// Unit-norm traceless parts, as real coordinates.
    coords: Vec<Vec<T>>,
    residual: T,
}

impl<T: Real> GeneratorCone<T> {
    pub fn new(generators: Vec<Hermitian<T>>, residual: T) -> Result<Self> {
        let n = generators.first().ok_or_else(|| input("need at least one generator"))?.dim();
        if let Some(g) = generators.iter().find(|g| g.dim() != n) {
            return Err(input(format!("generators mix dimensions {n} and {}", g.dim())));
        }
        let mut cone = Self { algebra: BlockAlgebra::matrix(n), generators: Vec::new(), coords: Vec::new(), residual };
        for g in generators {
            cone.push(g);
        }
        Ok(cone)
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim(0)
    }

    pub fn generators(&self) -> &[Hermitian<T>] {
        &self.generators
    }

    fn traceless_unit(&self, a: &Hermitian<T>) -> Option<Vec<T>> {
        let n = self.dim();
        let t = a.add_scalar(-a.trace() / T::from_usize_lossy(n));
        let f = t.frobenius();
        (f > T::lit(1e-12) * a.frobenius().max(T::one())).then(|| t.scale(f.recip()).real_coords())
    }

    fn push(&mut self, g: Hermitian<T>) -> bool {
        match self.traceless_unit(&g) {
            Some(c) => {
                self.coords.push(c);
                self.generators.push(g);
                true
            }
            None => false,
        }
    }

    /// Distance from the unit-normalized traceless part of `a` to the cone.
    pub fn distance(&self, a: &Hermitian<T>) -> T {
        match self.traceless_unit(a) {
            None => T::zero(),
            Some(b) => nnls(&self.coords, &b).residual,
        }
    }

    pub fn contains(&self, a: &Hermitian<T>) -> bool {
        self.distance(a) <= self.residual
    }

    /// Drops generators lying in the cone of the others (extreme rays suffice).
    pub fn prune(&mut self) {
        self.prune_within(self.residual * T::lit(0.1));
    }

    /// Drops generators within `slack` of the cone of the others. Any subset
    /// of valid generators spans a sub-cone, so this never invalidates a witness.
    pub fn prune_within(&mut self, slack: T) {
        let mut i = self.coords.len();
        while i > 0 {
            i -= 1;
            let target = self.coords.swap_remove(i);
            let g = self.generators.swap_remove(i);
            if nnls(&self.coords, &target).residual > slack {
                self.coords.push(target);
                self.generators.push(g);
                let last = self.coords.len() - 1;
                self.coords.swap(i, last);
                self.generators.swap(i, last);
            }
        }
    }

    /// `dim span(G ∪ {1})`.
    pub fn span_dim(&self) -> usize {
        1 + coords_rank(&self.coords, T::lit(1e-8))
    }

    /// Whether the cone is all of `Herm(N)`: full span and `−b` inside for a
    /// spanning subset `b` of the generators.
    pub fn is_everything(&self) -> bool {
        self.span_dim() == self.dim() * self.dim() && self.gap_direction().is_none()
    }

    /// For a full-span cone that is not everything: a direction `r` with
    /// `⟨r, g⟩ ≤ 0` on all generators (the residual of a failed negation test).
    fn gap_direction(&self) -> Option<Vec<T>> {
        for i in independent_subset(&self.coords, T::lit(1e-8)) {
            let b: Vec<T> = self.coords[i].iter().map(|&v| -v).collect();
            let sol = nnls(&self.coords, &b);
            if sol.residual > self.residual {
                let mut r = b;
                for (c, &w) in self.coords.iter().zip(&sol.x) {
                    r.iter_mut().zip(c).for_each(|(t, &cv)| *t -= w * cv);
                }
                return Some(r);
            }
        }
        None
    }
}

impl<T: Real> MembershipOracle<T> for GeneratorCone<T> {
    fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    /// NNLS cannot tell interior from boundary, so the verdict is inside
    /// or outside and the margin is minus the residual distance.
    fn membership(&self, a: &BlockElement<T>, tol: T) -> Result<Membership<T>> {
        check_algebra(&self.algebra, a)?;
        let d = self.distance(a.block(0));
        let tol = scaled_tol(tol, T::one()).max(self.residual);
        let verdict = if d <= tol { Verdict::Inside } else { Verdict::Outside };
        Ok(Membership { verdict, margin: -d, tol })
    }
}

/// Random nonnegative combinations of generators plus constants; every draw is in the cone.
pub struct GeneratorSampler<'a, T> {
    cone: &'a GeneratorCone<T>,
}

impl<'a, T: Real> GeneratorSampler<'a, T> {
    pub fn new(cone: &'a GeneratorCone<T>) -> Self {
        Self { cone }
    }
}

impl<T: Real> ElementSampler<T> for GeneratorSampler<'_, T> {
    fn algebra(&self) -> &BlockAlgebra {
        &self.cone.algebra
    }

    fn sample(&self, rng: &mut dyn RngCore) -> BlockElement<T> {
        BlockElement::single(random_combination(&self.cone.generators, self.cone.dim(), rng))
    }
}

fn random_combination<T: Real>(gens: &[Hermitian<T>], n: usize, rng: &mut dyn RngCore) -> Hermitian<T> {
    let c: T = uniform(rng, -3.0, 3.0);
    let mut x = Hermitian::scalar(n, c);
    if gens.is_empty() {
        return x;
    }
    let terms = rng.random_range(1..=3.min(gens.len()));
    for _ in 0..terms {
        let g = &gens[rng.random_range(0..gens.len())];
        let w: T = uniform(rng, 0.05, 1.0);
        x = x.add(&g.scale(w / g.frobenius().max(T::epsilon())));
    }
    x
}

fn coords_rank<T: Real>(coords: &[Vec<T>], rel: T) -> usize {
    if coords.is_empty() {
        return 0;
    }
    let d = coords[0].len();
    let m = CMatrix::from_fn(coords.len(), d, |i, j| C::new(coords[i][j], T::zero()));
    let s = svd(&m).s;
    let top = s.first().copied().unwrap_or(T::zero());
    s.iter().filter(|&&v| v > rel * top && top > T::zero()).count()
}

/// Greedy maximal linearly independent subset (indices).
fn independent_subset<T: Real>(coords: &[Vec<T>], rel: T) -> Vec<usize> {
    let mut q: Vec<Vec<T>> = Vec::new();
    let mut out = Vec::new();
    for (i, c) in coords.iter().enumerate() {
        let mut v = c.clone();
        for _ in 0..2 {
            for qi in &q {
                let h: T = qi.iter().zip(&v).map(|(&a, &b)| a * b).sum();
                v.iter_mut().zip(qi).for_each(|(t, &qv)| *t -= h * qv);
            }
        }
        let n = v.iter().map(|&t| t * t).sum::<T>().sqrt();
        if n > rel {
            q.push(v.into_iter().map(|t| t / n).collect());
            out.push(i);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SaturationConfig<T> {
    pub max_rounds: usize,
    pub seed: u64,
    /// Candidate elements built from the current generators each round.
    pub candidates_per_round: usize,
    pub max_generators: usize,
    /// Residual threshold of the conic feasibility test.
    pub residual: T,
    /// Operations other than isotone calculus of combinations.
    pub use_layer_cake: bool,
    pub use_projection_lattice: bool,
}

impl<T: Real> Default for SaturationConfig<T> {
    fn default() -> Self {
        Self {
            max_rounds: 50,
            seed: 0,
            candidates_per_round: 48,
            max_generators: 400,
            residual: T::lit(1e-7),
            use_layer_cake: true,
            use_projection_lattice: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub span_dim: usize,
    pub generators: usize,
    pub added: usize,
    pub triviality_witnessed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaturationReport {
    pub n: usize,
    pub seed: u64,
    pub real_dim: usize,
    pub rounds: Vec<RoundRecord>,
    pub span_dim: usize,
    pub triviality_witnessed: bool,
    /// For each original generator `g`: is `−g` in the final cone?
    pub negated_originals_inside: Vec<bool>,
    pub generators: usize,
    pub status: String,
}

impl SaturationReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("round,span_dim,triviality_witnessed\n");
        for r in &self.rounds {
            s.push_str(&format!("{},{},{}\n", r.round, r.span_dim, r.triviality_witnessed));
        }
        s
    }
}

/// Saturates `cone(generators) + ℝ·1` under the isocone operations.
///
/// Each round builds random nonnegative combinations of the current
/// generators and adds those images under isotone calculus, their layer-cake
/// projections, and meets/joins of projections that fall outside the current
/// cone. `p∧q` and `p∨q` are the top spectral projection and the support of
/// `p+q`, so they are themselves isotone images.
pub fn saturate<T: Real>(generators: &[Hermitian<T>], cfg: &SaturationConfig<T>) -> Result<SaturationReport> {
    let n = generators.first().ok_or_else(|| input("saturation needs at least one generator"))?.dim();
    if n < 2 {
        return Err(input("saturation needs N ≥ 2"));
    }
    let mut cone = GeneratorCone::new(generators.to_vec(), cfg.residual)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut projections: Vec<Projection<T>> = Vec::new();
    let ptol = T::lit(1e-8).max(T::solver_floor() * T::lit(64.0));
    for g in generators {
        if let Ok(p) = Projection::new(g.clone(), ptol) {
            projections.push(p);
        }
    }
    let mut rounds = Vec::new();
    let mut witnessed = cone.is_everything();
    for round in 1..=cfg.max_rounds {
        if witnessed {
            break;
        }
        let mut candidates: Vec<Hermitian<T>> = Vec::new();
        for _ in 0..cfg.candidates_per_round {
            let x = random_combination(&cone.generators, n, &mut rng);
            let Ok(e) = eig_hermitian(&x, eig_tol()) else { continue };
            let (lo, hi) = (e.min(), e.max());
            if hi - lo <= T::lit(1e-9) {
                continue;
            }
            candidates.push(x.clone());
            if let Ok(fx) = crate::herm::apply_isotone(&x, &random_isotone(&mut rng, lo, hi)) {
                candidates.push(fx);
            }
            if cfg.use_layer_cake {
                if let Ok(lc) = layer_cake(&x, T::lit(1e-9)) {
                    for p in lc.projections {
                        if let Ok(pp) = Projection::new(p.clone(), ptol) {
                            projections.push(pp);
                        }
                        candidates.push(p);
                    }
                }
            }
        }
        if cfg.use_projection_lattice && projections.len() >= 2 {
            for _ in 0..cfg.candidates_per_round / 2 {
                let i = rng.random_range(0..projections.len());
                let j = rng.random_range(0..projections.len());
                if i == j {
                    continue;
                }
                for p in [proj_meet(&projections[i], &projections[j], ptol), proj_join(&projections[i], &projections[j], ptol)].into_iter().flatten() {
                    if p.rank() > 0 && p.rank() < n {
                        candidates.push(p.matrix().clone());
                    }
                }
            }
        }
        if let Some(r) = cone.gap_direction() {
            // candidates reaching across the separating hyperplane first
            let score = |c: &Hermitian<T>| {
                cone.traceless_unit(c).map_or(T::neg_infinity(), |u| u.iter().zip(&r).map(|(&a, &b)| a * b).sum())
            };
            let mut scored: Vec<(T, Hermitian<T>)> = candidates.into_iter().map(|c| (score(&c), c)).collect();
            scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
            candidates = scored.into_iter().map(|(_, c)| c).collect();
        }
        let mut added = 0;
        for c in candidates {
            if cone.generators.len() >= cfg.max_generators {
                break;
            }
            if !cone.contains(&c) && cone.push(c) {
                added += 1;
            }
        }
        if cone.generators.len() > cfg.max_generators / 2 {
            cone.prune();
            let mut slack = T::lit(1e-3);
            while cone.generators.len() > cfg.max_generators * 3 / 4 && slack < T::lit(0.5) {
                cone.prune_within(slack);
                slack *= T::lit(2.0);
            }
        }
        if projections.len() > 4 * cfg.max_generators {
            projections.drain(..projections.len() - 2 * cfg.max_generators);
        }
        witnessed = cone.is_everything();
        rounds.push(RoundRecord {
            round,
            span_dim: cone.span_dim(),
            generators: cone.generators.len(),
            added,
            triviality_witnessed: witnessed,
        });
    }
    let negated_originals_inside = generators.iter().map(|g| cone.contains(&g.scale(-T::one()))).collect();
    let status = if witnessed {
        "triviality witnessed: the cone is all of Herm(N)".to_owned()
    } else {
        format!("not saturated within {} rounds", rounds.len())
    };
    Ok(SaturationReport {
        n,
        seed: cfg.seed,
        real_dim: n * n,
        span_dim: cone.span_dim(),
        rounds,
        triviality_witnessed: witnessed,
        negated_originals_inside,
        generators: cone.generators.len(),
        status,
    })
}
