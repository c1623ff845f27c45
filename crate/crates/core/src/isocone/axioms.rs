use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cone::{Membership, MembershipOracle};
use super::sampler::ElementSampler;
use crate::algebra::{BlockElement, ElementRecord};
use crate::error::{input, Error, Result};
use crate::herm::{svd::svd, CMatrix, C};
use crate::random::{derive_seed, random_isotone, uniform};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Constants,
    Sums,
    IsotoneCalculus,
    Closedness,
    SpanDensity,
    CommutingMeetJoin,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::Constants,
        Axiom::Sums,
        Axiom::IsotoneCalculus,
        Axiom::Closedness,
        Axiom::SpanDensity,
        Axiom::CommutingMeetJoin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Constants => "constants",
            Axiom::Sums => "sums",
            Axiom::IsotoneCalculus => "isotone-calculus",
            Axiom::Closedness => "closedness",
            Axiom::SpanDensity => "span-density",
            Axiom::CommutingMeetJoin => "commuting-meet-join",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxiomStatus {
    Pass,
    Fail,
    NotTestable,
}

/// Re-running the checker with `seed` reproduces `trial`; `inputs` were
/// accepted, `result` was rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub seed: u64,
    pub trial: usize,
    pub trial_seed: u64,
    pub inputs: Vec<ElementRecord>,
    pub result: ElementRecord,
    pub margin: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomOutcome {
    pub axiom: Axiom,
    pub status: AxiomStatus,
    pub trials: usize,
    pub failures: usize,
    /// Smallest membership margin seen on a produced element.
    pub min_margin: Option<f64>,
    pub counterexample: Option<Counterexample>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub outcomes: Vec<AxiomOutcome>,
    pub span_dim: usize,
    pub real_dim: usize,
    pub rejected_samples: usize,
}

impl AxiomReport {
    /// Every testable axiom passed.
    pub fn all_pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.status != AxiomStatus::Fail)
    }

    pub fn outcome(&self, axiom: Axiom) -> &AxiomOutcome {
        self.outcomes.iter().find(|o| o.axiom == axiom).expect("every axiom is reported")
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AxiomConfig<T> {
    pub trials: usize,
    pub seed: u64,
    pub tol: T,
    /// Draws allowed per requested sample before giving up on the sampler.
    pub max_attempts: usize,
}

impl<T: Real> Default for AxiomConfig<T> {
    fn default() -> Self {
        Self { trials: 200, seed: 0, tol: T::lit(1e-9), max_attempts: 50 }
    }
}

struct Tracker {
    axiom: Axiom,
    seed: u64,
    trials: usize,
    failures: usize,
    min_margin: Option<f64>,
    counterexample: Option<Counterexample>,
}

impl Tracker {
    fn new(axiom: Axiom, seed: u64) -> Self {
        Self { axiom, seed, trials: 0, failures: 0, min_margin: None, counterexample: None }
    }

    fn record<T: Real>(
        &mut self,
        trial: usize,
        trial_seed: u64,
        inputs: &[&BlockElement<T>],
        result: &BlockElement<T>,
        m: Membership<T>,
        detail: &str,
    ) {
        let margin = m.margin.to_f64_lossy();
        if margin.is_finite() {
            self.min_margin = Some(self.min_margin.map_or(margin, |v: f64| v.min(margin)));
        }
        if !m.verdict.accepted() {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(Counterexample {
                    seed: self.seed,
                    trial,
                    trial_seed,
                    inputs: inputs.iter().map(|e| e.to_record()).collect(),
                    result: result.to_record(),
                    margin,
                    detail: detail.to_owned(),
                });
            }
        }
    }

    fn finish(self) -> AxiomOutcome {
        AxiomOutcome {
            axiom: self.axiom,
            status: if self.failures == 0 { AxiomStatus::Pass } else { AxiomStatus::Fail },
            trials: self.trials,
            failures: self.failures,
            min_margin: self.min_margin,
            counterexample: self.counterexample,
            note: None,
        }
    }
}

struct Draw<'a, T: Real> {
    oracle: &'a dyn MembershipOracle<T>,
    sampler: &'a dyn ElementSampler<T>,
    tol: T,
    max_attempts: usize,
    rejected: usize,
    pool: Vec<BlockElement<T>>,
}

impl<T: Real> Draw<'_, T> {
    fn next(&mut self, rng: &mut ChaCha8Rng) -> Result<BlockElement<T>> {
        for _ in 0..self.max_attempts {
            let a = self.sampler.sample(rng);
            if self.oracle.accepts(&a, self.tol)? {
                self.pool.push(a.clone());
                return Ok(a);
            }
            self.rejected += 1;
        }
        Err(Error::Resource(format!("sampler produced no inside element in {} attempts", self.max_attempts)))
    }
}

/// Statistical test of the isocone axioms on elements produced by `sampler`.
pub fn check_axioms<T: Real>(
    oracle: &dyn MembershipOracle<T>,
    sampler: &dyn ElementSampler<T>,
    cfg: &AxiomConfig<T>,
) -> Result<AxiomReport> {
    let alg = oracle.algebra().clone();
    if sampler.algebra() != &alg {
        return Err(input("sampler and oracle live in different algebras"));
    }
    let tol = cfg.tol;
    let mut draw = Draw { oracle, sampler, tol, max_attempts: cfg.max_attempts.max(1), rejected: 0, pool: Vec::new() };
    let mut consts = Tracker::new(Axiom::Constants, cfg.seed);
    let mut sums = Tracker::new(Axiom::Sums, cfg.seed);
    let mut calc = Tracker::new(Axiom::IsotoneCalculus, cfg.seed);
    let mut mj = Tracker::new(Axiom::CommutingMeetJoin, cfg.seed);

    for trial in 0..cfg.trials {
        let ts = derive_seed(cfg.seed, 0, trial as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(ts);
        let c: T = if trial == 0 { T::zero() } else { uniform(&mut rng, -10.0, 10.0) };
        let e = BlockElement::scalar(&alg, c);
        consts.trials += 1;
        consts.record(trial, ts, &[], &e, oracle.membership(&e, tol)?, "constant multiple of the unit");

        let ts = derive_seed(cfg.seed, 1, trial as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(ts);
        let a = draw.next(&mut rng)?;
        let b = draw.next(&mut rng)?;
        let s = a.add(&b);
        sums.trials += 1;
        sums.record(trial, ts, &[&a, &b], &s, oracle.membership(&s, tol)?, "a + b");

        let ts = derive_seed(cfg.seed, 2, trial as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(ts);
        let a = draw.next(&mut rng)?;
        let (lo, hi) = spectral_range(&a)?;
        let f = random_isotone(&mut rng, lo, hi);
        let fa = a.apply_isotone(&f)?;
        calc.trials += 1;
        calc.record(trial, ts, &[&a], &fa, oracle.membership(&fa, tol)?, &format!("f(a), f knots {:?}", f.knots()));

        let ts = derive_seed(cfg.seed, 3, trial as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(ts);
        let a = draw.next(&mut rng)?;
        let (lo, hi) = spectral_range(&a)?;
        let fa = a.apply_isotone(&random_isotone(&mut rng, lo, hi))?;
        let ga = a.apply_isotone(&random_isotone(&mut rng, lo, hi))?;
        let j = fa.join(&ga)?;
        let m = fa.meet(&ga)?;
        mj.trials += 1;
        mj.record(trial, ts, &[&fa, &ga], &j, oracle.membership(&j, tol)?, "f(a) ∨ g(a)");
        mj.record(trial, ts, &[&fa, &ga], &m, oracle.membership(&m, tol)?, "f(a) ∧ g(a)");
    }

    let real_dim = alg.real_dim();
    let span_dim = span_dimension(&draw.pool, T::lit(1e-8))?;
    let span = AxiomOutcome {
        axiom: Axiom::SpanDensity,
        status: if span_dim == real_dim { AxiomStatus::Pass } else { AxiomStatus::Fail },
        trials: draw.pool.len(),
        failures: usize::from(span_dim != real_dim),
        min_margin: None,
        counterexample: None,
        note: Some(format!("span of accepted samples has dimension {span_dim} of {real_dim}")),
    };
    let closed = AxiomOutcome {
        axiom: Axiom::Closedness,
        status: AxiomStatus::NotTestable,
        trials: 0,
        failures: 0,
        min_margin: None,
        counterexample: None,
        note: Some("topological closure cannot be probed by finite sampling".into()),
    };
    Ok(AxiomReport {
        seed: cfg.seed,
        trials: cfg.trials,
        tol: tol.to_f64_lossy(),
        outcomes: vec![consts.finish(), sums.finish(), calc.finish(), closed, span, mj.finish()],
        span_dim,
        real_dim,
        rejected_samples: draw.rejected,
    })
}

/// Smallest and largest eigenvalue over all blocks, widened when they coincide.
fn spectral_range<T: Real>(a: &BlockElement<T>) -> Result<(T, T)> {
    let spec = a.spectrum()?;
    let lo = spec.first().map_or(T::zero(), |s| s.0);
    let hi = spec.last().map_or(T::zero(), |s| s.0);
    Ok(if hi - lo > T::epsilon() * T::lit(64.0) { (lo, hi) } else { (lo - T::one(), hi + T::one()) })
}

/// Dimension of the real linear span of `elements`, relative threshold `rel`.
pub(crate) fn span_dimension<T: Real>(elements: &[BlockElement<T>], rel: T) -> Result<usize> {
    let Some(first) = elements.first() else { return Ok(0) };
    let d = first.algebra().real_dim();
    let m = CMatrix::from_fn(elements.len(), d, |_, _| C::new(T::zero(), T::zero()));
    let mut m = m;
    for (i, e) in elements.iter().enumerate() {
        for (j, v) in e.real_coords().into_iter().enumerate() {
            m[(i, j)] = C::new(v, T::zero());
        }
    }
    let s = svd(&m).s;
    let top = s.first().copied().unwrap_or(T::zero());
    if top == T::zero() {
        return Ok(0);
    }
    Ok(s.iter().filter(|&&v| v > rel * top).count())
}
