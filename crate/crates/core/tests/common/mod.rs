//! Random cones, posets and projections shared by the integration tests.
#![allow(dead_code)]

use isocone_core::algebra::BlockAlgebra;
use isocone_core::herm::Projection;
use isocone_core::isocone::{BlochRegion, ClassifiedIsocone, InnerCone};
use isocone_core::poset::Poset;
use isocone_core::random::{random_direction, random_unitary};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_poset(rng: &mut ChaCha8Rng, k: usize, p: f64) -> Poset {
    let mut rel = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if rng.random_bool(p) {
                rel.push((i, j));
            }
        }
    }
    // relabel so the order is not always compatible with the index order
    let mut perm: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let rel: Vec<_> = rel.into_iter().map(|(a, b)| (perm[a], perm[b])).collect();
    Poset::from_relations(k, &rel).expect("acyclic by construction")
}

pub fn random_cap(rng: &mut ChaCha8Rng) -> BlochRegion<f64> {
    BlochRegion::cap(random_direction(rng), rng.random_range(0.2..1.45)).unwrap()
}

pub fn random_polygon(rng: &mut ChaCha8Rng) -> BlochRegion<f64> {
    loop {
        let c: [f64; 3] = random_direction(rng);
        let m = rng.random_range(3..=6);
        let normals = (0..m)
            .map(|_| {
                let r: [f64; 3] = random_direction(rng);
                [c[0] + 0.9 * r[0], c[1] + 0.9 * r[1], c[2] + 0.9 * r[2]]
            })
            .collect();
        if let Ok(p) = BlochRegion::polygon(normals) {
            return p;
        }
    }
}

pub fn random_classified(rng: &mut ChaCha8Rng) -> ClassifiedIsocone<f64> {
    let k = rng.random_range(1..=4);
    let dims: Vec<usize> = (0..k).map(|_| rng.random_range(1..=3)).collect();
    let inner = dims
        .iter()
        .map(|&n| {
            if n == 2 && rng.random_bool(0.8) {
                InnerCone::region(if rng.random_bool(0.7) { random_cap(rng) } else { random_polygon(rng) })
            } else {
                InnerCone::full(n)
            }
        })
        .collect();
    let poset = random_poset(rng, k, 0.5);
    ClassifiedIsocone::new(BlockAlgebra::new(dims).unwrap(), poset, inner).unwrap()
}

pub fn random_projection(rng: &mut ChaCha8Rng, n: usize, r: usize) -> Projection<f64> {
    let u = random_unitary::<f64, _>(rng, n);
    Projection::from_orthonormal(u.columns(&(0..r).collect::<Vec<_>>()))
}
