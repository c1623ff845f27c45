//! End-to-end use of the public API: build cones from posets, decide
//! membership, read off inner and state orders, and recover normal forms.

use std::f64::consts::FRAC_PI_4;

use approx::assert_abs_diff_eq;
use isocone_core::algebra::{BlockAlgebra, BlockElement};
use isocone_core::classify::{classify, ClassifyConfig};
use isocone_core::herm::{Hermitian, Projection};
use isocone_core::isocone::{
    layer_cake, lexicographic_sum_isocone, m2_membership, saturate, BlochRegion, ClassifiedIsocone, InnerCone,
    MembershipOracle, SaturationConfig, Verdict,
};
use isocone_core::order_maps::{inner_order, pure_state_compare, state_compare, Comparison, PureState, SpectralFrame};
use isocone_core::poset::{cardinal_sum, lexicographic_sum, ordinal_sum, up_sets, Poset};
use isocone_core::spec_doc::ConeSpecDocument;
use isocone_core::two_subspace::{convex_combo_spectrum, halmos_decompose, ComboLabel};
use isocone_core::{ClassifiedIsocone64, Hermitian64};

const TOL: f64 = 1e-9;

fn scalars(vals: &[f64]) -> BlockElement<f64> {
    BlockElement::from_block_scalars(&BlockAlgebra::new(vec![1; vals.len()]).unwrap(), vals)
}

fn scalar_parts(k: usize) -> Vec<ClassifiedIsocone64> {
    vec![ClassifiedIsocone::trivial(&BlockAlgebra::matrix(1)); k]
}

fn z_cap() -> BlochRegion<f64> {
    BlochRegion::cap([0.0, 0.0, 1.0], FRAC_PI_4).unwrap()
}

#[test]
fn four_point_poset_cone_members_are_upset_indicators() {
    let two = Poset::antichain(2);
    let p = ordinal_sum(&cardinal_sum(&Poset::chain(1), &Poset::chain(1)), &two);
    assert_eq!(p, lexicographic_sum(&Poset::chain(2), &[two.clone(), two]).unwrap());
    let cone = lexicographic_sum_isocone(&p, &scalar_parts(4)).unwrap();
    let ups = up_sets(&p).unwrap();
    for mask in 0u32..16 {
        let vals: Vec<f64> = (0..4).map(|i| f64::from(mask >> i & 1)).collect();
        assert_eq!(cone.accepts(&scalars(&vals), TOL).unwrap(), ups.contains(mask), "mask {mask:04b}");
    }
}

#[test]
fn membership_examples() {
    let chain = lexicographic_sum_isocone(&Poset::chain(2), &scalar_parts(2)).unwrap();
    assert_eq!(chain.membership(&scalars(&[0.0, 1.0]), TOL).unwrap().verdict, Verdict::Inside);
    assert_eq!(chain.membership(&scalars(&[1.0, 0.0]), TOL).unwrap().verdict, Verdict::Outside);
    let anti = lexicographic_sum_isocone(&Poset::antichain(2), &scalar_parts(2)).unwrap();
    assert!(anti.accepts(&scalars(&[1.0, 0.0]), TOL).unwrap());

    let alg = BlockAlgebra::new(vec![2, 1]).unwrap();
    let cone = ClassifiedIsocone::new(alg.clone(), Poset::chain(2), vec![InnerCone::region(z_cap()), InnerCone::full(1)]).unwrap();
    let a = BlockElement::new(&alg, vec![Hermitian::from_real_diag(&[2.0, 1.0]), Hermitian::scalar(1, 3.0)]).unwrap();
    assert_eq!(cone.membership(&a, TOL).unwrap().verdict, Verdict::Inside);

    assert!(m2_membership(&z_cap(), &Hermitian::scalar(2, 7.0), TOL).unwrap().verdict.accepted());
    let sx = Hermitian::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    assert_eq!(m2_membership(&z_cap(), &sx, TOL).unwrap().verdict, Verdict::Outside);
}

#[test]
fn layer_cake_of_diagonal() {
    let lc = layer_cake(&Hermitian64::from_real_diag(&[1.0, 2.0, 3.0]), 1e-9).unwrap();
    assert_abs_diff_eq!(lc.shift, 1.0, epsilon = 1e-12);
    assert_eq!(lc.weights.len(), 2);
    for ((w, p), diag) in lc.weights.iter().zip(&lc.projections).zip([[0.0, 1.0, 1.0], [0.0, 0.0, 1.0]]) {
        assert_abs_diff_eq!(*w, 1.0, epsilon = 1e-12);
        for (i, d) in diag.iter().enumerate() {
            assert_abs_diff_eq!(p.get(i, i).re, *d, epsilon = 1e-12);
        }
    }
    let lc = layer_cake(&Hermitian64::scalar(3, 4.0), 1e-9).unwrap();
    assert!(lc.projections.is_empty());
    assert_abs_diff_eq!(lc.shift, 4.0, epsilon = 1e-12);
}

#[test]
fn inner_orders_on_qubit_cones() {
    let cap = ClassifiedIsocone::m2(z_cap());
    let a = BlockElement::single(Hermitian64::from_real_diag(&[-1.0, 1.0]).add(&Hermitian::from_real_rows(&[vec![0.0, 0.1], vec![0.1, 0.0]]).unwrap()));
    // Bloch direction of diag(-1, 1) is -z: the cap accepts its negative
    let frame = SpectralFrame::new(&a.neg(), TOL).unwrap();
    assert_eq!(inner_order(&cap, &frame, TOL).unwrap(), Poset::chain(2));

    let full = ClassifiedIsocone::<f64>::trivial(&BlockAlgebra::matrix(3));
    let frame = SpectralFrame::new(&BlockElement::single(Hermitian::from_real_diag(&[1.0, 2.0, 3.0])), TOL).unwrap();
    assert_eq!(inner_order(&full, &frame, TOL).unwrap(), Poset::antichain(3));
}

#[test]
fn state_order_examples() {
    let alg = BlockAlgebra::new(vec![1, 1, 2]).unwrap();
    let cone = ClassifiedIsocone::new(alg.clone(), Poset::from_relations(3, &[(0, 2)]).unwrap(), vec![
        InnerCone::full(1),
        InnerCone::full(1),
        InnerCone::region(z_cap()),
    ])
    .unwrap();
    let low = PureState::new(0, vec![1.0.into()]).unwrap();
    let south = PureState::from_bloch(2, [0.0, 0.0, -1.0]).unwrap();
    let north = PureState::from_bloch(2, [0.0, 0.0, 1.0]).unwrap();
    let side = PureState::new(1, vec![1.0.into()]).unwrap();
    assert_eq!(pure_state_compare(&cone, &low, &north, TOL).unwrap(), Comparison::Less);
    assert_eq!(pure_state_compare(&cone, &side, &north, TOL).unwrap(), Comparison::Incomparable);
    assert_eq!(pure_state_compare(&cone, &south, &north, TOL).unwrap(), Comparison::Less);
    let (rs, rn) = (south.density(&alg).unwrap(), north.density(&alg).unwrap());
    assert_eq!(state_compare(&cone, &rs, &rn, TOL).unwrap(), Comparison::Less);
    assert_eq!(state_compare(&cone, &rn, &rn, TOL).unwrap(), Comparison::Equivalent);
}

#[test]
fn forty_five_degree_pair() {
    let pl = Projection::new(Hermitian64::from_real_diag(&[1.0, 0.0]), 1e-10).unwrap();
    let pn = Projection::new(Hermitian::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(), 1e-10).unwrap();
    let hd = halmos_decompose(&pl, &pn, 1e-9).unwrap();
    assert_eq!(hd.generic_dim(), 1);
    assert_abs_diff_eq!(hd.h_spectrum().unwrap()[0], 0.5, epsilon = 1e-12);
    let cs = convex_combo_spectrum(&pl, &pn, 0.5, 1e-9).unwrap();
    let half = std::f64::consts::FRAC_1_SQRT_2 / 2.0;
    assert_abs_diff_eq!(cs.group(ComboLabel::SPlus).unwrap().values[0], 0.5 + half, epsilon = 1e-12);
    assert_abs_diff_eq!(cs.group(ComboLabel::SMinus).unwrap().values[0], 0.5 - half, epsilon = 1e-12);
}

#[test]
fn classification_of_a_spec_document() {
    let text = r#"{"dims":[1,2,1],"poset":{"relations":[[1,2],[3,2]]},
        "inner":[{"kind":"full"},{"kind":"cap","center":[0,1,0],"angle":0.9},{"kind":"full"}]}"#;
    let truth: ClassifiedIsocone64 = ConeSpecDocument::parse(text).unwrap().to_cone().unwrap();
    let res = classify(&truth, &ClassifyConfig { trials: 200, ..Default::default() }).unwrap();
    assert_eq!(&res.poset, truth.poset());
    let Some(&BlochRegion::Cap { center, angle }) = res.inner[1].cone.bloch_region() else { panic!("expected a cap") };
    assert!((angle - 0.9).abs() < 0.05 && center[1] > 0.99);
}

#[test]
fn saturation_spans_herm2_without_triviality() {
    let gens = [[0.1, 0.0, 0.5], [0.0, 0.1, 0.5], [-0.1, -0.1, 0.5]].map(|v| Hermitian64::pauli(1.0, v));
    let rep = saturate(&gens, &SaturationConfig { max_rounds: 10, ..Default::default() }).unwrap();
    assert_eq!(rep.span_dim, 4);
    assert!(!rep.triviality_witnessed);
}
