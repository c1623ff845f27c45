mod common;

use common::{random_cap, random_classified, random_polygon};
use isocone_core::algebra::BlockElement;
use isocone_core::herm::{Hermitian, IsotoneFunction};
use isocone_core::isocone::{layer_cake_element, BlochRegion, ClassifiedIsocone, ClassifiedSampler, ElementSampler, InnerCone, MembershipOracle};
use isocone_core::random::{random_direction, random_isotone};
use isocone_core::spec_doc::ConeSpecDocument;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn spectral_range(a: &BlockElement<f64>) -> (f64, f64) {
    let s = a.spectrum().unwrap();
    (s.first().unwrap().0, s.last().unwrap().0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn membership_ignores_constants(seed in any::<u64>(), c in -50.0f64..50.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cone = random_classified(&mut rng);
        let a = ClassifiedSampler::new(&cone).sample(&mut rng);
        let m0 = cone.membership(&a, TOL).unwrap();
        let m1 = cone.membership(&a.add_scalar(c), TOL).unwrap();
        prop_assert!(m0.verdict.accepted());
        prop_assert!(m1.verdict.accepted());
        let b = a.neg();
        if !m0.margin.is_infinite() && m0.margin > 1e-6 {
            let n0 = cone.membership(&b, TOL).unwrap().verdict;
            let n1 = cone.membership(&b.add_scalar(c), TOL).unwrap().verdict;
            prop_assert_eq!(n0, n1);
        }
    }

    #[test]
    fn isotone_calculus_and_layer_cake_stay_inside(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cone = random_classified(&mut rng);
        let a = ClassifiedSampler::new(&cone).sample(&mut rng);
        let (lo, hi) = spectral_range(&a);
        let f: IsotoneFunction<f64> = random_isotone(&mut rng, lo - 0.1, hi + 0.1);
        prop_assert!(cone.accepts(&a.apply_isotone(&f).unwrap(), TOL).unwrap());
        let (projections, weights, _) = layer_cake_element(&a, 1e-9).unwrap();
        prop_assert!(weights.iter().all(|&w| w >= 0.0));
        for p in &projections {
            prop_assert!(cone.accepts(p, TOL).unwrap());
        }
    }

    #[test]
    fn commuting_products_stay_inside(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cone = random_classified(&mut rng);
        let a = ClassifiedSampler::new(&cone).sample(&mut rng);
        let (lo, hi) = spectral_range(&a);
        // nonnegative isotone images of one element commute among themselves
        let f: IsotoneFunction<f64> = random_isotone(&mut rng, lo, hi);
        let g: IsotoneFunction<f64> = random_isotone(&mut rng, lo, hi);
        let shift = |h: &IsotoneFunction<f64>| -h.values().iter().cloned().fold(f64::INFINITY, f64::min) + 0.1;
        let c1 = a.apply_isotone(&f).unwrap().add_scalar(shift(&f));
        let c2 = a.apply_isotone(&g).unwrap().add_scalar(shift(&g));
        prop_assert!(c1.commutator_norm(&c2) < 1e-8);
        let blocks = c1
            .blocks()
            .iter()
            .zip(c2.blocks())
            .map(|(x, y)| Hermitian::symmetrize(&x.matrix().matmul(y.matrix())))
            .collect();
        let product = BlockElement::new(a.algebra(), blocks).unwrap();
        prop_assert!(cone.accepts(&product, TOL).unwrap());
    }

    #[test]
    fn m2_noncommuting_join_meet(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let region = if rng.random_bool(0.5) { random_cap(&mut rng) } else { random_polygon(&mut rng) };
        let cone = ClassifiedIsocone::m2(region);
        let s = ClassifiedSampler::new(&cone);
        let (a, b) = (s.sample(&mut rng), s.sample(&mut rng));
        prop_assert!(cone.accepts(&a.join(&b).unwrap(), TOL).unwrap());
        prop_assert!(cone.accepts(&a.meet(&b).unwrap(), TOL).unwrap());
    }

    #[test]
    fn wide_caps_normalize_to_full(seed in any::<u64>(), extra in 0.01f64..1.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d: [f64; 3] = random_direction(&mut rng);
        let r = BlochRegion::cap(d, std::f64::consts::FRAC_PI_2 + extra).unwrap();
        prop_assert!(r.is_sphere());
        prop_assert!(InnerCone::region(r).is_full());
    }

    #[test]
    fn spec_documents_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cone = random_classified(&mut rng);
        let text = ConeSpecDocument::from_cone(&cone).to_json();
        let parsed = ConeSpecDocument::parse(&text).unwrap();
        prop_assert_eq!(parsed.to_json(), text);
        let back: ClassifiedIsocone<f64> = parsed.to_cone().unwrap();
        prop_assert_eq!(back.poset(), cone.poset());
    }

    #[test]
    fn single_precision_agrees_away_from_boundary(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cone = random_classified(&mut rng);
        let cone32: ClassifiedIsocone<f32> = ConeSpecDocument::from_cone(&cone).to_cone().unwrap();
        let a = isocone_core::random::random_hermitian::<f64, _>(&mut rng, cone.algebra().dim(0));
        let mut blocks = vec![a];
        for x in 1..cone.algebra().blocks() {
            blocks.push(isocone_core::random::random_hermitian(&mut rng, cone.algebra().dim(x)));
        }
        let e = BlockElement::new(cone.algebra(), blocks).unwrap();
        let m = cone.membership(&e, TOL).unwrap();
        prop_assume!(m.margin.abs() > 1e-3);
        let m32 = cone32.membership(&e.cast::<f32>(), 1e-5).unwrap();
        prop_assert_eq!(m.verdict.accepted(), m32.verdict.accepted());
    }
}
