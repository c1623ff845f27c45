use crate::algebra::BlockElement;
use crate::error::Result;
use crate::herm::{eig_hermitian, eig_tol, Hermitian};
use crate::scalar::Real;

/// `a = Σ λᵢ pᵢ + λ·1` with `pᵢ` the spectral projection onto eigenvalues `≥ μᵢ₊₁`.
#[derive(Clone, Debug)]
pub struct LayerCake<T> {
    pub projections: Vec<Hermitian<T>>,
    pub weights: Vec<T>,
    pub shift: T,
}

impl<T: Real> LayerCake<T> {
    pub fn reconstruct(&self, n: usize) -> Hermitian<T> {
        self.projections
            .iter()
            .zip(&self.weights)
            .fold(Hermitian::scalar(n, self.shift), |acc, (p, &w)| acc.add(&p.scale(w)))
    }
}

/// Distinct eigenvalues are those separated by more than `gap_tol`.
pub fn layer_cake<T: Real>(a: &Hermitian<T>, gap_tol: T) -> Result<LayerCake<T>> {
    let e = eig_hermitian(a, eig_tol())?;
    let clusters = e.clusters(gap_tol);
    let mean = |c: &Vec<usize>| c.iter().map(|&k| e.values[k]).sum::<T>() / T::from_usize_lossy(c.len());
    let levels: Vec<T> = clusters.iter().map(mean).collect();
    let mut projections = Vec::new();
    let mut weights = Vec::new();
    for i in 1..clusters.len() {
        let idx: Vec<usize> = (clusters[i][0]..e.dim()).collect();
        projections.push(e.projection_onto(&idx));
        weights.push(levels[i] - levels[i - 1]);
    }
    Ok(LayerCake { projections, weights, shift: levels[0] })
}

/// Block-element version: one chain over the union spectrum, so the
/// projections are commuting elements of the algebra.
pub fn layer_cake_element<T: Real>(a: &BlockElement<T>, gap_tol: T) -> Result<(Vec<BlockElement<T>>, Vec<T>, T)> {
    let spec = a.spectrum()?;
    let mut levels: Vec<T> = Vec::new();
    for (v, _) in spec {
        if levels.last().is_none_or(|&l| v - l > gap_tol) {
            levels.push(v);
        }
    }
    let mut projections = Vec::new();
    let mut weights = Vec::new();
    for i in 1..levels.len() {
        let cut = (levels[i - 1] + levels[i]) * T::lit(0.5);
        projections.push(a.apply_function(move |v| if v > cut { T::one() } else { T::zero() })?);
        weights.push(levels[i] - levels[i - 1]);
    }
    Ok((projections, weights, levels.first().copied().unwrap_or(T::zero())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_123() {
        let a = Hermitian::<f64>::from_real_diag(&[1.0, 2.0, 3.0]);
        let lc = layer_cake(&a, 1e-9).unwrap();
        assert!((lc.shift - 1.0).abs() < 1e-14);
        assert_eq!(lc.weights.len(), 2);
        assert!(lc.weights.iter().all(|w| (w - 1.0).abs() < 1e-14));
        assert!(lc.projections[0].sub(&Hermitian::from_real_diag(&[0.0, 1.0, 1.0])).frobenius() < 1e-12);
        assert!(lc.projections[1].sub(&Hermitian::from_real_diag(&[0.0, 0.0, 1.0])).frobenius() < 1e-12);
    }

    #[test]
    fn scalar_has_no_layers() {
        let lc = layer_cake(&Hermitian::scalar(3, 4.5), 1e-9).unwrap();
        assert!(lc.projections.is_empty());
        assert_eq!(lc.shift, 4.5);
    }

    #[test]
    fn reconstructs_random() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 1..6 {
            let a: Hermitian<f64> = crate::random::random_hermitian(&mut rng, n);
            let lc = layer_cake(&a, 1e-12).unwrap();
            assert!(lc.reconstruct(n).sub(&a).frobenius() < 1e-10);
            for p in &lc.projections {
                for q in &lc.projections {
                    assert!(p.commutator_norm(q) < 1e-10);
                }
            }
        }
    }
}
