use std::path::Path;

use isocone_core::classify::{bloch_probe, classify, fibonacci_sphere, verify_classification, ClassifyConfig};
use isocone_core::isocone::{
    check_axioms, saturate, AxiomConfig, AxiomStatus, ClassifiedIsocone, ClassifiedSampler, ElementSampler, GeneratorSampler,
    MembershipOracle, RejectionSampler, SaturationConfig, Verdict,
};
use isocone_core::order_maps::{inner_order, state_compare, DensityMatrix, SpectralFrame};
use isocone_core::spec_doc::{parse_element, ConeSpecDocument, GeneratorsDocument, OracleDocument};
use isocone_core::{BlockElement64, ToleranceConfig};
use serde::Serialize;

use crate::report::{inner_order_dot, read_input, write_output, CliError, CliResult, Input, Report};
use crate::{Cli, Command};

const DEFAULT_TOL: f64 = 1e-9;

struct Ctx<'a> {
    tol: Option<f64>,
    seed: Option<u64>,
    json: Option<&'a Path>,
}

impl Ctx<'_> {
    fn tol(&self, doc: Option<f64>) -> CliResult<f64> {
        let t = self.tol.or(doc).unwrap_or(DEFAULT_TOL);
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Usage(format!("--tol must be positive and finite, got {t}")));
        }
        Ok(t)
    }

    fn seed(&self, doc: Option<u64>) -> u64 {
        self.seed.or(doc).unwrap_or(0)
    }

    fn report<R: Serialize>(&self, command: &'static str, seed: u64, tol: f64, spec: &Input, warnings: Vec<String>, result: R) -> Report<R> {
        Report { command, seed, tolerance: ToleranceConfig::new(tol), spec_sha256: spec.sha256.clone(), warnings, result }
    }
}

fn load_oracle(input: &Input) -> CliResult<OracleDocument> {
    input.ctx(OracleDocument::parse(&input.text))
}

fn load_classified(input: &Input) -> CliResult<ConeSpecDocument> {
    input.ctx(ConeSpecDocument::parse(&input.text))
}

fn load_element(path: &Path) -> CliResult<(BlockElement64, Vec<String>)> {
    let input = read_input(path)?;
    let (e, warnings) = input.ctx(parse_element::<f64>(&input.text))?;
    for w in &warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok((e, warnings))
}

fn same_algebra(oracle: &dyn MembershipOracle<f64>, e: &BlockElement64, path: &Path) -> CliResult<()> {
    if oracle.algebra() != e.algebra() {
        return Err(CliError::Core(
            Some(path.to_owned()),
            isocone_core::Error::Input(format!(
                "element has block sizes {:?}, cone has {:?}",
                e.algebra().dims(),
                oracle.algebra().dims()
            )),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckResult {
    verdict: String,
    margin: f64,
    scaled_tol: f64,
}

#[derive(Serialize)]
struct InnerOrderResult {
    eigenvalues: Vec<f64>,
    relations: Vec<[usize; 2]>,
    dot: String,
}

#[derive(Serialize)]
struct BlochSummary {
    block: usize,
    samples: usize,
    accepted: usize,
}

pub fn run(cli: Cli) -> CliResult<u8> {
    let ctx = Ctx { tol: cli.tol, seed: cli.seed, json: cli.json.as_deref() };
    match cli.command {
        Command::Check { spec, element } => {
            let spec = read_input(&spec)?;
            let doc = load_oracle(&spec)?;
            let tol = ctx.tol(doc.tolerance())?;
            let oracle = spec.ctx(doc.oracle::<f64>())?;
            let (a, warnings) = load_element(&element)?;
            same_algebra(oracle.as_ref(), &a, &element)?;
            let m = oracle.membership(&a, tol)?;
            let (word, code) = match m.verdict {
                Verdict::Inside => ("inside", 0),
                Verdict::Outside => ("outside", 1),
                Verdict::Boundary => ("boundary", 2),
            };
            println!("{word} margin={:e} tol={:e}", m.margin, m.tol);
            let r = CheckResult { verdict: word.into(), margin: m.margin, scaled_tol: m.tol };
            ctx.report("check", ctx.seed(doc.seed()), tol, &spec, warnings, r).emit(ctx.json)?;
            Ok(code)
        }
        Command::InnerOrder { spec, element, dot } => {
            let spec = read_input(&spec)?;
            let doc = load_oracle(&spec)?;
            let tol = ctx.tol(doc.tolerance())?;
            let oracle = spec.ctx(doc.oracle::<f64>())?;
            let (a, warnings) = load_element(&element)?;
            same_algebra(oracle.as_ref(), &a, &element)?;
            let frame = SpectralFrame::new(&a, tol)?;
            let order = inner_order(oracle.as_ref(), &frame, tol)?;
            let values = frame.values();
            let text = inner_order_dot(&order, &values);
            match &dot {
                Some(p) => write_output(p, &text)?,
                None => print!("{text}"),
            }
            let relations = isocone_core::poset::hasse(&order).into_iter().map(|(x, y)| [x + 1, y + 1]).collect();
            let r = InnerOrderResult { eigenvalues: values, relations, dot: text };
            ctx.report("inner-order", ctx.seed(doc.seed()), tol, &spec, warnings, r).emit(ctx.json)?;
            Ok(0)
        }
        Command::Axioms { spec, saturation, trials } => {
            let path = spec.or(saturation).ok_or_else(|| CliError::Usage("axioms needs a spec path or --saturation".into()))?;
            let spec = read_input(&path)?;
            let doc = load_oracle(&spec)?;
            let tol = ctx.tol(doc.tolerance())?;
            let seed = ctx.seed(doc.seed());
            let cfg = AxiomConfig { trials, seed, tol, ..Default::default() };
            let report = match &doc {
                OracleDocument::Classified(d) => {
                    let cone: ClassifiedIsocone<f64> = spec.ctx(d.to_cone())?;
                    check_axioms(&cone, &ClassifiedSampler::new(&cone), &cfg)?
                }
                OracleDocument::Generators(d) => {
                    let cone = spec.ctx(d.to_cone::<f64>())?;
                    check_axioms(&cone, &GeneratorSampler::new(&cone), &cfg)?
                }
                OracleDocument::SignedPsd(_) => {
                    let oracle = spec.ctx(doc.oracle::<f64>())?;
                    let sampler = RejectionSampler::new(oracle.as_ref(), tol);
                    check_axioms(oracle.as_ref(), &sampler as &dyn ElementSampler<f64>, &cfg)?
                }
            };
            let all = report.all_pass();
            let out = ctx.report("axioms", seed, tol, &spec, Vec::new(), report);
            println!("{}", out.header());
            for o in &out.result.outcomes {
                let status = match o.status {
                    AxiomStatus::Pass => "PASS",
                    AxiomStatus::Fail => "FAIL",
                    AxiomStatus::NotTestable => "N/A ",
                };
                print!("{status} {:<20} trials={:<4} failures={}", o.axiom.name(), o.trials, o.failures);
                if let Some(m) = o.min_margin {
                    print!(" min_margin={m:.3e}");
                }
                if let Some(n) = &o.note {
                    print!(" ({n})");
                }
                println!();
                if let Some(c) = &o.counterexample {
                    println!("     counterexample: trial {} (trial seed {}): {}", c.trial, c.trial_seed, c.detail);
                }
            }
            println!("span_dim={} real_dim={}", out.result.span_dim, out.result.real_dim);
            out.emit(ctx.json)?;
            Ok(if all { 0 } else { 1 })
        }
        Command::Saturate { generators, rounds, csv } => {
            let spec = read_input(&generators)?;
            let doc = spec.ctx(GeneratorsDocument::parse(&spec.text))?;
            let tol = ctx.tol(doc.tolerance)?;
            let seed = ctx.seed(doc.seed);
            let (gens, warnings) = spec.ctx(doc.hermitians::<f64>())?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            let mut cfg = SaturationConfig::<f64> { max_rounds: rounds, seed, ..Default::default() };
            if let Some(r) = doc.residual {
                cfg.residual = r;
            }
            let report = spec.ctx(saturate(&gens, &cfg))?;
            if let Some(p) = &csv {
                write_output(p, &report.to_csv())?;
            }
            let out = ctx.report("saturate", seed, tol, &spec, warnings, report);
            println!("{}", out.header());
            let r = &out.result;
            println!(
                "rounds={} span_dim={}/{} triviality_witnessed={} generators={} status={}",
                r.rounds.len(),
                r.span_dim,
                r.real_dim,
                r.triviality_witnessed,
                r.generators,
                r.status
            );
            out.emit(ctx.json)?;
            Ok(0)
        }
        Command::Classify { spec, trials, grid } => {
            let spec = read_input(&spec)?;
            let doc = load_oracle(&spec)?;
            let tol = ctx.tol(doc.tolerance())?;
            let seed = ctx.seed(doc.seed());
            let oracle = spec.ctx(doc.oracle::<f64>())?;
            let cfg = ClassifyConfig { trials, seed, tol, grid };
            let result = classify(oracle.as_ref(), &cfg)?;
            let cone = result.to_cone()?;
            let agreement = verify_classification(oracle.as_ref(), &cone, &cfg)?;
            let mut out = ConeSpecDocument::from_cone(&cone);
            out.name = doc.name().map(str::to_owned);
            out.seed = Some(seed);
            out.tolerance = Some(tol);
            print!("{}", out.to_json());
            eprintln!(
                "verification: {}/{} agree ({} block patterns, {} witnesses)",
                agreement.agreed,
                agreement.compared,
                agreement.exhaustive_patterns,
                agreement.witnesses.len()
            );
            #[derive(Serialize)]
            struct ClassifyResult {
                recovered: ConeSpecDocument,
                verification: isocone_core::classify::AgreementReport,
            }
            let r = ClassifyResult { recovered: out, verification: agreement };
            ctx.report("classify", seed, tol, &spec, Vec::new(), r).emit(ctx.json)?;
            Ok(0)
        }
        Command::StateCompare { spec, rho1, rho2 } => {
            let spec = read_input(&spec)?;
            let doc = load_classified(&spec)?;
            let tol = ctx.tol(doc.tolerance)?;
            let cone: ClassifiedIsocone<f64> = spec.ctx(doc.to_cone())?;
            let mut warnings = Vec::new();
            let mut states = Vec::new();
            for p in [&rho1, &rho2] {
                let (e, w) = load_element(p)?;
                same_algebra(&cone, &e, p)?;
                warnings.extend(w);
                states.push(DensityMatrix::new(e, tol).map_err(|e| CliError::Core(Some(p.clone()), e))?);
            }
            let c = state_compare(&cone, &states[0], &states[1], tol)?;
            println!("{c}");
            ctx.report("state-compare", ctx.seed(doc.seed), tol, &spec, warnings, c).emit(ctx.json)?;
            Ok(0)
        }
        Command::BlochExport { spec, samples, block, csv } => {
            let spec = read_input(&spec)?;
            let doc = load_oracle(&spec)?;
            let tol = ctx.tol(doc.tolerance())?;
            let oracle = spec.ctx(doc.oracle::<f64>())?;
            let alg = oracle.algebra().clone();
            let x = match block {
                Some(b) if b == 0 || b > alg.blocks() => {
                    return Err(CliError::Usage(format!("--block must lie in 1..={}", alg.blocks())))
                }
                Some(b) => b - 1,
                None => (0..alg.blocks())
                    .find(|&x| alg.dim(x) == 2)
                    .ok_or_else(|| CliError::Usage("the algebra has no 2x2 block".into()))?,
            };
            if alg.dim(x) != 2 {
                return Err(CliError::Usage(format!("block {} is not 2x2", x + 1)));
            }
            let poset = match &doc {
                OracleDocument::Classified(d) => spec.ctx(d.to_cone::<f64>())?.poset().clone(),
                _ => isocone_core::classify::recover_poset(oracle.as_ref(), &ClassifyConfig { tol, ..Default::default() })?,
            };
            let mut text = String::from("x,y,z,accepted\n");
            let mut accepted = 0;
            for d in fibonacci_sphere::<f64>(samples) {
                let ok = oracle.accepts(&bloch_probe(&alg, &poset, x, &d), tol)?;
                accepted += usize::from(ok);
                text.push_str(&format!("{},{},{},{}\n", d[0], d[1], d[2], ok));
            }
            match &csv {
                Some(p) => write_output(p, &text)?,
                None => print!("{text}"),
            }
            eprintln!("accepted {accepted}/{samples} directions on block {}", x + 1);
            let r = BlochSummary { block: x + 1, samples, accepted };
            ctx.report("bloch-export", ctx.seed(doc.seed()), tol, &spec, Vec::new(), r).emit(ctx.json)?;
            Ok(0)
        }
    }
}
