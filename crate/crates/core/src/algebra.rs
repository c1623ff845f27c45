//! The finite-dimensional C*-algebra `A = ⊕ₓ M_{nₓ}(ℂ)`, its self-adjoint
//! elements, and the block morphisms used to transport cones.

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::herm::{
    apply_isotone, eig_hermitian, eig_tol, join, meet, CMatrix, Hermitian, IsotoneFunction,
    SpectralDecomposition, C,
};
use crate::isocone::region::transpose3;
use crate::isocone::{ClassifiedIsocone, InnerCone};
use crate::poset::Poset;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockAlgebra {
    dims: Vec<usize>,
}

impl BlockAlgebra {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(input("block algebra needs at least one block"));
        }
        if dims.contains(&0) {
            return Err(input("block dimensions must be positive"));
        }
        Ok(Self { dims })
    }

    /// `M_n(ℂ)` as a one-block algebra.
    pub fn matrix(n: usize) -> Self {
        Self::new(vec![n]).expect("n > 0")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn blocks(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self, x: usize) -> usize {
        self.dims[x]
    }

    /// `N = Σ nₓ`.
    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Real dimension of the self-adjoint part, `Σ nₓ²`.
    pub fn real_dim(&self) -> usize {
        self.dims.iter().map(|n| n * n).sum()
    }

    pub fn offset(&self, x: usize) -> usize {
        self.dims[..x].iter().sum()
    }

    /// The element `ιₓ`.
    pub fn block_unit<T: Real>(&self, x: usize) -> Result<BlockElement<T>> {
        if x >= self.blocks() {
            return Err(input(format!("block index {x} out of range (k = {})", self.blocks())));
        }
        let mut c = vec![T::zero(); self.blocks()];
        c[x] = T::one();
        Ok(BlockElement::from_block_scalars(self, &c))
    }
}

/// A self-adjoint element `(aₓ)ₓ`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockElement<T> {
    algebra: BlockAlgebra,
    blocks: Vec<Hermitian<T>>,
}

impl<T: Real> BlockElement<T> {
    pub fn new(algebra: &BlockAlgebra, blocks: Vec<Hermitian<T>>) -> Result<Self> {
        if blocks.len() != algebra.blocks() {
            return Err(Error::Dimension { expected: algebra.blocks(), found: blocks.len() });
        }
        for (x, b) in blocks.iter().enumerate() {
            if b.dim() != algebra.dim(x) {
                return Err(Error::Dimension { expected: algebra.dim(x), found: b.dim() });
            }
        }
        Ok(Self { algebra: algebra.clone(), blocks })
    }

    pub fn zeros(algebra: &BlockAlgebra) -> Self {
        Self::scalar(algebra, T::zero())
    }

    pub fn scalar(algebra: &BlockAlgebra, c: T) -> Self {
        Self::from_block_scalars(algebra, &vec![c; algebra.blocks()])
    }

    /// `(c₁·1, …, c_k·1)`.
    pub fn from_block_scalars(algebra: &BlockAlgebra, c: &[T]) -> Self {
        let blocks = algebra
            .dims()
            .iter()
            .zip(c)
            .map(|(&n, &cx)| Hermitian::scalar(n, cx))
            .collect();
        Self { algebra: algebra.clone(), blocks }
    }

    /// Single-block element of `M_n(ℂ)`.
    pub fn single(a: Hermitian<T>) -> Self {
        Self { algebra: BlockAlgebra::matrix(a.dim()), blocks: vec![a] }
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[Hermitian<T>] {
        &self.blocks
    }

    pub fn block(&self, x: usize) -> &Hermitian<T> {
        &self.blocks[x]
    }

    pub fn with_block(&self, x: usize, b: Hermitian<T>) -> Result<Self> {
        let mut blocks = self.blocks.clone();
        blocks[x] = b;
        Self::new(&self.algebra, blocks)
    }

    /// Block-diagonal `N×N` matrix.
    pub fn embed(&self) -> Hermitian<T> {
        let n = self.algebra.total();
        let mut m = CMatrix::zeros(n, n);
        for (x, b) in self.blocks.iter().enumerate() {
            let o = self.algebra.offset(x);
            m.set_block(o, o, b.matrix());
        }
        Hermitian::symmetrize(&m)
    }

    /// Diagonal blocks of an `N×N` hermitian matrix (off-block entries dropped).
    pub fn from_embedded(algebra: &BlockAlgebra, h: &Hermitian<T>) -> Result<Self> {
        if h.dim() != algebra.total() {
            return Err(Error::Dimension { expected: algebra.total(), found: h.dim() });
        }
        let blocks = (0..algebra.blocks())
            .map(|x| {
                let o = algebra.offset(x);
                let n = algebra.dim(x);
                Hermitian::symmetrize(&h.matrix().block(o, o, n, n))
            })
            .collect();
        Ok(Self { algebra: algebra.clone(), blocks })
    }

    fn zip(&self, rhs: &Self, f: impl Fn(&Hermitian<T>, &Hermitian<T>) -> Hermitian<T>) -> Self {
        assert_eq!(self.algebra, rhs.algebra, "algebra mismatch");
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| f(a, b)).collect(),
        }
    }

    fn map(&self, f: impl Fn(&Hermitian<T>) -> Hermitian<T>) -> Self {
        Self { algebra: self.algebra.clone(), blocks: self.blocks.iter().map(f).collect() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, Hermitian::add)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, Hermitian::sub)
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|b| b.scale(s))
    }

    pub fn add_scalar(&self, c: T) -> Self {
        self.map(|b| b.add_scalar(c))
    }

    pub fn neg(&self) -> Self {
        self.scale(-T::one())
    }

    pub fn frobenius(&self) -> T {
        self.blocks.iter().map(|b| b.frobenius().powi(2)).sum::<T>().sqrt()
    }

    /// `Σ tr(aₓ bₓ)`.
    pub fn inner(&self, rhs: &Self) -> T {
        self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a.inner(b)).sum()
    }

    pub fn spectra(&self) -> Result<Vec<SpectralDecomposition<T>>> {
        self.blocks.iter().map(|b| eig_hermitian(b, eig_tol())).collect()
    }

    /// Union of block spectra, ascending, with the owning block of each value.
    pub fn spectrum(&self) -> Result<Vec<(T, usize)>> {
        let mut out: Vec<(T, usize)> = self
            .spectra()?
            .iter()
            .enumerate()
            .flat_map(|(x, e)| e.values.iter().map(move |&v| (v, x)))
            .collect();
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        Ok(out)
    }

    /// Largest eigenvalue modulus over all blocks.
    pub fn spectral_norm(&self) -> Result<T> {
        Ok(self
            .spectra()?
            .iter()
            .map(|e| e.min().abs().max(e.max().abs()))
            .fold(T::zero(), T::max))
    }

    /// Blockwise isotone functional calculus (it commutes with the block projections).
    pub fn apply_isotone(&self, f: &IsotoneFunction<T>) -> Result<Self> {
        let blocks = self.blocks.iter().map(|b| apply_isotone(b, f)).collect::<Result<_>>()?;
        Ok(Self { algebra: self.algebra.clone(), blocks })
    }

    pub fn apply_function(&self, f: impl Fn(T) -> T + Copy) -> Result<Self> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| crate::herm::apply_function(b, f))
            .collect::<Result<_>>()?;
        Ok(Self { algebra: self.algebra.clone(), blocks })
    }

    pub fn join(&self, rhs: &Self) -> Result<Self> {
        let blocks = self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| join(a, b)).collect::<Result<_>>()?;
        Ok(Self { algebra: self.algebra.clone(), blocks })
    }

    pub fn meet(&self, rhs: &Self) -> Result<Self> {
        let blocks = self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| meet(a, b)).collect::<Result<_>>()?;
        Ok(Self { algebra: self.algebra.clone(), blocks })
    }

    pub fn commutator_norm(&self, rhs: &Self) -> T {
        self.blocks
            .iter()
            .zip(&rhs.blocks)
            .map(|(a, b)| a.commutator_norm(b).powi(2))
            .sum::<T>()
            .sqrt()
    }

    /// Coordinates in an orthonormal basis of `ℜ(A)` (`Σ nₓ²` reals).
    pub fn real_coords(&self) -> Vec<T> {
        self.blocks.iter().flat_map(Hermitian::real_coords).collect()
    }

    pub fn to_record(&self) -> ElementRecord {
        ElementRecord {
            blocks: self
                .blocks
                .iter()
                .map(|b| {
                    (0..b.dim())
                        .map(|i| {
                            (0..b.dim())
                                .map(|j| {
                                    let z = b.get(i, j);
                                    [z.re.to_f64_lossy(), z.im.to_f64_lossy()]
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn cast<U: Real>(&self) -> BlockElement<U> {
        BlockElement { algebra: self.algebra.clone(), blocks: self.blocks.iter().map(Hermitian::cast).collect() }
    }
}

/// Serialized element: per block, rows of `[re, im]` entry pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub blocks: Vec<Vec<Vec<[f64; 2]>>>,
}

impl ElementRecord {
    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Rebuilds an element; asymmetry up to `tol` is symmetrized away.
    pub fn to_element<T: Real>(&self, tol: T) -> Result<BlockElement<T>> {
        let algebra = BlockAlgebra::new(self.dims())?;
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(x, rows)| {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(input(format!("block {} is not square", x + 1)));
                }
                let m = CMatrix::from_fn(n, n, |i, j| C::new(T::lit(rows[i][j][0]), T::lit(rows[i][j][1])));
                Hermitian::from_matrix(m, tol)
                    .map_err(|e| input(format!("block {}: {e}", x + 1)))
            })
            .collect::<Result<_>>()?;
        BlockElement::new(&algebra, blocks)
    }
}

/// Compositions of coordinate projections with block-diagonal unitary conjugation:
/// target block `t` receives `U_t · a_{assignment[t]} · U_t*`.
#[derive(Clone, Debug)]
pub struct BlockMorphism<T> {
    source: BlockAlgebra,
    target: BlockAlgebra,
    assignment: Vec<usize>,
    unitaries: Vec<Option<CMatrix<T>>>,
}

impl<T: Real> BlockMorphism<T> {
    pub fn new(source: &BlockAlgebra, assignment: Vec<usize>, unitaries: Vec<Option<CMatrix<T>>>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(input("morphism needs at least one target block"));
        }
        if unitaries.len() != assignment.len() {
            return Err(Error::Dimension { expected: assignment.len(), found: unitaries.len() });
        }
        let mut dims = Vec::with_capacity(assignment.len());
        for (t, &s) in assignment.iter().enumerate() {
            if s >= source.blocks() {
                return Err(input(format!("assignment {s} out of range")));
            }
            let n = source.dim(s);
            if let Some(u) = &unitaries[t] {
                if u.rows() != n || u.cols() != n {
                    return Err(Error::Dimension { expected: n, found: u.rows() });
                }
                let err = (&u.matmul(&u.adjoint()) - &CMatrix::identity(n)).frobenius();
                if err > T::lit(1e-8).max(T::solver_floor() * T::lit(64.0)) {
                    return Err(input(format!("block {t} conjugation is not unitary ({err})")));
                }
            }
            dims.push(n);
        }
        Ok(Self { source: source.clone(), target: BlockAlgebra::new(dims)?, assignment, unitaries })
    }

    /// `π_S`: keep the blocks `blocks` in that order.
    pub fn projection(source: &BlockAlgebra, blocks: Vec<usize>) -> Result<Self> {
        let k = blocks.len();
        Self::new(source, blocks, vec![None; k])
    }

    pub fn source(&self) -> &BlockAlgebra {
        &self.source
    }

    pub fn target(&self) -> &BlockAlgebra {
        &self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn unitary(&self, t: usize) -> Option<&CMatrix<T>> {
        self.unitaries[t].as_ref()
    }

    /// Distinct source blocks: the map is onto the target.
    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.source.blocks()];
        self.assignment.iter().all(|&s| !std::mem::replace(&mut seen[s], true))
    }

    pub fn apply(&self, a: &BlockElement<T>) -> Result<BlockElement<T>> {
        if a.algebra() != &self.source {
            return Err(input("element does not live on the morphism source"));
        }
        let blocks = self
            .assignment
            .iter()
            .zip(&self.unitaries)
            .map(|(&s, u)| match u {
                Some(u) => a.block(s).conjugate_by(u),
                None => a.block(s).clone(),
            })
            .collect();
        BlockElement::new(&self.target, blocks)
    }
}

/// Rotation `R` with `U (d·σ) U* = (R d)·σ` for a 2×2 unitary `U`.
pub fn bloch_rotation<T: Real>(u: &CMatrix<T>) -> [[T; 3]; 3] {
    let mut r = [[T::zero(); 3]; 3];
    for j in 0..3 {
        let mut e = [T::zero(); 3];
        e[j] = T::one();
        let img = Hermitian::pauli(T::zero(), e).conjugate_by(u);
        let (_, v) = img.pauli_coords();
        for i in 0..3 {
            r[i][j] = v[i];
        }
    }
    r
}

/// `π(I)` for a surjective block morphism: restricted poset, inner cones
/// carried along (rotated by the block conjugations).
pub fn pushforward_isocone<T: Real>(m: &BlockMorphism<T>, cone: &ClassifiedIsocone<T>) -> Result<ClassifiedIsocone<T>> {
    if cone.algebra() != m.source() {
        return Err(input("cone does not live on the morphism source"));
    }
    if !m.is_surjective() {
        return Err(Error::UnsupportedMorphism("pushforward needs distinct source blocks".into()));
    }
    let poset = cone.poset().restrict(m.assignment());
    let inner = m
        .assignment()
        .iter()
        .enumerate()
        .map(|(t, &s)| transport_inner(cone.inner_cone(s), m.unitary(t), false))
        .collect();
    ClassifiedIsocone::new(m.target().clone(), poset, inner)
}

/// `ℜ(π⁻¹(J))`: `J` on the image blocks, isolated full blocks elsewhere.
pub fn pullback_isocone<T: Real>(m: &BlockMorphism<T>, cone: &ClassifiedIsocone<T>) -> Result<ClassifiedIsocone<T>> {
    if cone.algebra() != m.target() {
        return Err(input("cone does not live on the morphism target"));
    }
    if !m.is_surjective() {
        return Err(Error::UnsupportedMorphism("pullback needs distinct source blocks".into()));
    }
    let k = m.source().blocks();
    let mut relations = Vec::new();
    for (a, b) in cone.poset().strict_pairs() {
        relations.push((m.assignment()[a], m.assignment()[b]));
    }
    let poset = Poset::from_relations(k, &relations)?;
    let mut inner: Vec<InnerCone<T>> = m.source().dims().iter().map(|&n| InnerCone::full(n)).collect();
    for (t, &s) in m.assignment().iter().enumerate() {
        inner[s] = transport_inner(cone.inner_cone(t), m.unitary(t), true);
    }
    ClassifiedIsocone::new(m.source().clone(), poset, inner)
}

fn transport_inner<T: Real>(c: &InnerCone<T>, u: Option<&CMatrix<T>>, inverse: bool) -> InnerCone<T> {
    match (c, u) {
        (InnerCone::Region { region }, Some(u)) => {
            let r = bloch_rotation(u);
            let r = if inverse { transpose3(&r) } else { r };
            InnerCone::region(region.rotated(&r))
        }
        _ => c.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_scalars() {
        let a = BlockAlgebra::new(vec![1, 1]).unwrap();
        let e = BlockElement::from_block_scalars(&a, &[0.0, 1.0]).embed();
        assert!(e.sub(&Hermitian::from_real_diag(&[0.0, 1.0])).frobenius() < 1e-15);
    }

    #[test]
    fn embed_pauli_and_scalar() {
        let a = BlockAlgebra::new(vec![2, 1]).unwrap();
        let sx = Hermitian::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let el = BlockElement::new(&a, vec![sx, Hermitian::scalar(1, 5.0)]).unwrap();
        let expect = Hermitian::from_real_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 5.0],
        ])
        .unwrap();
        assert_eq!(el.embed(), expect);
        assert_eq!(BlockElement::<f64>::zeros(&a).embed(), Hermitian::zeros(3));
    }

    #[test]
    fn block_units() {
        let a = BlockAlgebra::new(vec![1, 1]).unwrap();
        let u: BlockElement<f64> = a.block_unit(0).unwrap();
        assert_eq!(u.embed(), Hermitian::from_real_diag(&[1.0, 0.0]));
        let b = BlockAlgebra::new(vec![2, 3]).unwrap();
        let u2: BlockElement<f64> = b.block_unit(1).unwrap();
        assert_eq!(u2.embed(), Hermitian::from_real_diag(&[0.0, 0.0, 1.0, 1.0, 1.0]));
        assert!(b.block_unit::<f64>(2).is_err());
        let one: BlockElement<f64> = BlockAlgebra::matrix(3).block_unit(0).unwrap();
        assert_eq!(one.embed(), Hermitian::identity(3));
    }

    #[test]
    fn units_sum_to_identity_and_commute() {
        let a = BlockAlgebra::new(vec![2, 1, 3]).unwrap();
        let units: Vec<BlockElement<f64>> = (0..3).map(|x| a.block_unit(x).unwrap()).collect();
        let s = units.iter().skip(1).fold(units[0].clone(), |acc, u| acc.add(u));
        assert_eq!(s.embed(), Hermitian::identity(6));
        for u in &units {
            for v in &units {
                assert_eq!(u.commutator_norm(v), 0.0);
            }
        }
    }

    #[test]
    fn surjectivity() {
        let a = BlockAlgebra::new(vec![1, 2]).unwrap();
        assert!(BlockMorphism::<f64>::projection(&a, vec![1, 0]).unwrap().is_surjective());
        assert!(!BlockMorphism::<f64>::projection(&a, vec![0, 0]).unwrap().is_surjective());
    }

    #[test]
    fn rotation_matches_conjugation() {
        // U = diag(1, i) rotates the Bloch sphere by +90° about z
        let mut u = CMatrix::<f64>::identity(2);
        u[(1, 1)] = C::new(0.0, 1.0);
        let r = bloch_rotation(&u);
        let d = [1.0, 0.0, 0.0];
        let img = Hermitian::pauli(0.0, d).conjugate_by(&u).pauli_coords().1;
        let rd: Vec<f64> = (0..3).map(|i| (0..3).map(|j| r[i][j] * d[j]).sum()).collect();
        for i in 0..3 {
            assert!((img[i] - rd[i]).abs() < 1e-14);
        }
    }

    fn cap_chain() -> ClassifiedIsocone<f64> {
        use crate::isocone::BlochRegion;
        let alg = BlockAlgebra::new(vec![2, 1]).unwrap();
        let cap = BlochRegion::cap([0.0, 0.0, 1.0], 0.5).unwrap();
        ClassifiedIsocone::new(alg, Poset::chain(2), vec![InnerCone::region(cap), InnerCone::full(1)]).unwrap()
    }

    #[test]
    fn pushforward_examples() {
        let cone = cap_chain();
        let id = BlockMorphism::projection(cone.algebra(), vec![0, 1]).unwrap();
        assert_eq!(pushforward_isocone(&id, &cone).unwrap(), cone);
        let second = BlockMorphism::projection(cone.algebra(), vec![1]).unwrap();
        assert_eq!(pushforward_isocone(&second, &cone).unwrap(), cone.component(1));
        let first = BlockMorphism::projection(cone.algebra(), vec![0]).unwrap();
        assert_eq!(pushforward_isocone(&first, &cone).unwrap(), cone.component(0));
        let dup = BlockMorphism::projection(cone.algebra(), vec![0, 0]).unwrap();
        assert!(matches!(pushforward_isocone(&dup, &cone), Err(Error::UnsupportedMorphism(_))));
    }

    #[test]
    fn pullback_examples() {
        use crate::isocone::MembershipOracle;
        let src = BlockAlgebra::new(vec![1, 1]).unwrap();
        let m = BlockMorphism::projection(&src, vec![0]).unwrap();
        let j = ClassifiedIsocone::<f64>::trivial(m.target());
        let pulled = pullback_isocone(&m, &j).unwrap();
        assert!(pulled.is_trivial());

        let cone = cap_chain();
        let all = BlockMorphism::projection(cone.algebra(), vec![0, 1]).unwrap();
        assert_eq!(pullback_isocone(&all, &cone).unwrap(), cone);

        // pull back a cap cone on block 1 of (2,1); block 2 is free
        let src = BlockAlgebra::new(vec![2, 1]).unwrap();
        let m = BlockMorphism::projection(&src, vec![0]).unwrap();
        let j = cone.component(0);
        let pulled = pullback_isocone(&m, &j).unwrap();
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let blocks = vec![crate::random::random_hermitian(&mut rng, 2), crate::random::random_hermitian(&mut rng, 1)];
            let a = BlockElement::new(&src, blocks).unwrap();
            let lhs = pulled.accepts(&a, 1e-9).unwrap();
            let rhs = j.accepts(&m.apply(&a).unwrap(), 1e-9).unwrap();
            assert_eq!(lhs, rhs);
        }
        // pullback then pushforward returns the image cone
        assert_eq!(pushforward_isocone(&m, &pulled).unwrap(), j);
    }

    #[test]
    fn conjugated_pushforward_agrees_with_membership() {
        use crate::isocone::MembershipOracle;
        use rand::SeedableRng;
        let cone = cap_chain();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let u = crate::random::random_unitary(&mut rng, 2);
        let m = BlockMorphism::new(cone.algebra(), vec![0, 1], vec![Some(u), None]).unwrap();
        let pushed = pushforward_isocone(&m, &cone).unwrap();
        for _ in 0..300 {
            let blocks = vec![crate::random::random_hermitian(&mut rng, 2), crate::random::random_hermitian(&mut rng, 1)];
            let a = BlockElement::new(cone.algebra(), blocks).unwrap();
            let v1 = cone.membership(&a, 1e-9).unwrap();
            let v2 = pushed.membership(&m.apply(&a).unwrap(), 1e-9).unwrap();
            assert_eq!(v1.verdict, v2.verdict, "{} vs {}", v1.margin, v2.margin);
        }
    }
}
