//! JSON documents: cone documents, generator sets, and element files.
//!
//! Relations are 1-based Hasse covers `[x, y]` meaning `x ≺ y`; vectors are
//! normalized on load so that parse → serialize → parse is a fixed point.

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::algebra::{BlockAlgebra, BlockElement, ElementRecord};
use crate::error::{Error, Result};
use crate::herm::Hermitian;
use crate::isocone::region::{norm3, V3};
use crate::isocone::{BlochRegion, ClassifiedIsocone, GeneratorCone, InnerCone, MembershipOracle, SignedPsdSet};
use crate::poset::{hasse, Poset};
use crate::scalar::Real;

/// Asymmetry above which loading an element emits a warning.
pub const ASYMMETRY_WARNING: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetDoc {
    #[serde(default)]
    pub relations: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InnerDoc {
    Full,
    Cap { center: [f64; 3], angle: f64 },
    Polygon { normals: Vec<[f64; 3]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpecDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub dims: Vec<usize>,
    #[serde(default)]
    pub poset: PosetDoc,
    /// One entry per block; omitted means every block is full.
    #[serde(default)]
    pub inner: Vec<InnerDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorsDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub generators: Vec<ElementRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignedPsdDocument {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dims: Vec<usize>,
}

/// Any document that can act as a membership oracle, selected by `kind`
/// (`classified` when absent, `generators`, or `signed-psd`).
#[derive(Clone, Debug, PartialEq)]
pub enum OracleDocument {
    Classified(ConeSpecDocument),
    Generators(GeneratorsDocument),
    SignedPsd(SignedPsdDocument),
}

fn parse_error(path: impl std::fmt::Display, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{path}: {msg}"))
}

/// Strict JSON parse with the failing field path and line/column in the error.
pub fn parse_json<D: DeserializeOwned>(text: &str) -> Result<D> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        parse_error(if path.is_empty() { ".".to_owned() } else { path }, e.into_inner())
    })
}

fn to_json<S: Serialize>(doc: &S) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

/// Unit vector, left bit-for-bit unchanged when already normalized.
fn unit(v: [f64; 3], path: &str) -> Result<[f64; 3]> {
    if v.iter().any(|c| !c.is_finite()) {
        return Err(parse_error(path, "vector entries must be finite"));
    }
    let n = norm3(&v);
    if n < 1e-12 {
        return Err(parse_error(path, "zero vector cannot be normalized"));
    }
    if (n - 1.0).abs() <= 4.0 * f64::EPSILON {
        return Ok(v);
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

fn lit3<T: Real>(v: [f64; 3]) -> V3<T> {
    [T::lit(v[0]), T::lit(v[1]), T::lit(v[2])]
}

fn f64_3<T: Real>(v: &V3<T>) -> [f64; 3] {
    [v[0].to_f64().unwrap_or(f64::NAN), v[1].to_f64().unwrap_or(f64::NAN), v[2].to_f64().unwrap_or(f64::NAN)]
}

impl ConeSpecDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: Self = parse_json(text)?;
        if let Some(k) = &doc.kind {
            if k != "classified" {
                return Err(parse_error("kind", format!("expected \"classified\", got {k:?}")));
            }
        }
        doc.normalized()
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// Validates and brings vectors and caps into canonical form.
    pub fn normalized(mut self) -> Result<Self> {
        let k = self.dims.len();
        if k == 0 {
            return Err(parse_error("dims", "at least one block is required"));
        }
        if let Some(i) = self.dims.iter().position(|&n| n == 0) {
            return Err(parse_error(format!("dims[{i}]"), "block dimension must be positive"));
        }
        for (i, &[x, y]) in self.poset.relations.iter().enumerate() {
            if x == 0 || y == 0 || x > k || y > k {
                return Err(parse_error(format!("poset.relations[{i}]"), format!("indices are 1-based and must lie in 1..={k}")));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(parse_error("tolerance", "must be positive and finite"));
            }
        }
        if self.inner.is_empty() {
            self.inner = vec![InnerDoc::Full; k];
        }
        if self.inner.len() != k {
            return Err(parse_error("inner", format!("expected {k} entries, found {}", self.inner.len())));
        }
        for (i, entry) in self.inner.iter_mut().enumerate() {
            let path = format!("inner[{i}]");
            if !matches!(entry, InnerDoc::Full) && self.dims[i] != 2 {
                return Err(parse_error(&path, format!("cap and polygon need a 2x2 block, block {} has size {}", i + 1, self.dims[i])));
            }
            let region = match entry {
                InnerDoc::Full => continue,
                InnerDoc::Cap { center, angle } => {
                    if !angle.is_finite() {
                        return Err(parse_error(format!("{path}.angle"), "must be finite"));
                    }
                    BlochRegion::cap(unit(*center, &format!("{path}.center"))?, *angle)
                }
                InnerDoc::Polygon { normals } => {
                    let ns = normals
                        .iter()
                        .enumerate()
                        .map(|(j, n)| unit(*n, &format!("{path}.normals[{j}]")))
                        .collect::<Result<Vec<_>>>()?;
                    BlochRegion::polygon(ns)
                }
            }
            .map_err(|e| parse_error(&path, e))?;
            *entry = InnerDoc::from_region(&region);
        }
        let cone: ClassifiedIsocone<f64> = self.to_cone().map_err(|e| parse_error("poset", e))?;
        self.poset.relations = relations_of(cone.poset());
        Ok(self)
    }

    pub fn algebra(&self) -> Result<BlockAlgebra> {
        BlockAlgebra::new(self.dims.clone())
    }

    pub fn to_cone<T: Real>(&self) -> Result<ClassifiedIsocone<T>> {
        let alg = self.algebra()?;
        let pairs: Vec<(usize, usize)> = self.poset.relations.iter().map(|&[x, y]| (x - 1, y - 1)).collect();
        let poset = Poset::from_relations(self.dims.len(), &pairs)?;
        let inner = self
            .dims
            .iter()
            .zip(&self.inner)
            .map(|(&n, d)| d.to_inner(n))
            .collect::<Result<Vec<_>>>()?;
        ClassifiedIsocone::new(alg, poset, inner)
    }

    pub fn from_cone<T: Real>(cone: &ClassifiedIsocone<T>) -> Self {
        Self {
            kind: None,
            name: None,
            seed: None,
            tolerance: None,
            dims: cone.algebra().dims().to_vec(),
            poset: PosetDoc { relations: relations_of(cone.poset()) },
            inner: cone.inner().iter().map(InnerDoc::from_inner).collect(),
        }
    }

    /// Copy without `name`, `seed` and `tolerance`.
    pub fn without_metadata(&self) -> Self {
        Self { kind: None, name: None, seed: None, tolerance: None, ..self.clone() }
    }
}

fn relations_of(p: &Poset) -> Vec<[usize; 2]> {
    let mut r: Vec<[usize; 2]> = hasse(p).into_iter().map(|(x, y)| [x + 1, y + 1]).collect();
    r.sort_unstable();
    r
}

impl InnerDoc {
    fn from_region<T: Real>(r: &BlochRegion<T>) -> Self {
        match r {
            BlochRegion::Sphere => Self::Full,
            BlochRegion::Cap { center, angle } => Self::Cap { center: f64_3(center), angle: angle.to_f64().unwrap_or(f64::NAN) },
            BlochRegion::Polygon { normals } => Self::Polygon { normals: normals.iter().map(f64_3).collect() },
        }
    }

    pub fn from_inner<T: Real>(c: &InnerCone<T>) -> Self {
        c.bloch_region().map_or(Self::Full, Self::from_region)
    }

    pub fn to_inner<T: Real>(&self, n: usize) -> Result<InnerCone<T>> {
        Ok(match self {
            Self::Full => InnerCone::full(n),
            Self::Cap { center, angle } => InnerCone::region(BlochRegion::cap(lit3(*center), T::lit(*angle))?),
            Self::Polygon { normals } => InnerCone::region(BlochRegion::polygon(normals.iter().map(|v| lit3(*v)).collect())?),
        })
    }
}

impl GeneratorsDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: Self = parse_json(text)?;
        if let Some(k) = &doc.kind {
            if k != "generators" {
                return Err(parse_error("kind", format!("expected \"generators\", got {k:?}")));
            }
        }
        if doc.generators.is_empty() {
            return Err(parse_error("generators", "at least one generator is required"));
        }
        let n = doc.generators[0].dims();
        for (i, g) in doc.generators.iter().enumerate() {
            if g.dims().len() != 1 || g.dims() != n {
                return Err(parse_error(format!("generators[{i}]"), format!("every generator must be a single block of size {:?}", n)));
            }
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// Hermitian generators plus load warnings (symmetrized asymmetry).
    pub fn hermitians<T: Real>(&self) -> Result<(Vec<Hermitian<T>>, Vec<String>)> {
        let mut warnings = Vec::new();
        let mut out = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            let (e, w) = load_record::<T>(g).map_err(|e| parse_error(format!("generators[{i}]"), e))?;
            warnings.extend(w.into_iter().map(|w| format!("generators[{i}]: {w}")));
            out.push(e.block(0).clone());
        }
        Ok((out, warnings))
    }

    pub fn to_cone<T: Real>(&self) -> Result<GeneratorCone<T>> {
        let (gens, _) = self.hermitians()?;
        GeneratorCone::new(gens, T::lit(self.residual.unwrap_or(1e-7)))
    }
}

impl OracleDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let v: serde_json::Value = parse_json(text)?;
        match v.get("kind").and_then(|k| k.as_str()) {
            None | Some("classified") => Ok(Self::Classified(ConeSpecDocument::parse(text)?)),
            Some("generators") => Ok(Self::Generators(GeneratorsDocument::parse(text)?)),
            Some("signed-psd") => {
                let d: SignedPsdDocument = parse_json(text)?;
                BlockAlgebra::new(d.dims.clone()).map_err(|e| parse_error("dims", e))?;
                Ok(Self::SignedPsd(d))
            }
            Some(k) => Err(parse_error("kind", format!("unknown document kind {k:?}"))),
        }
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            Self::Classified(d) => d.name.as_deref(),
            Self::Generators(d) => d.name.as_deref(),
            Self::SignedPsd(d) => d.name.as_deref(),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::Classified(d) => d.seed,
            Self::Generators(d) => d.seed,
            Self::SignedPsd(_) => None,
        }
    }

    pub fn tolerance(&self) -> Option<f64> {
        match self {
            Self::Classified(d) => d.tolerance,
            Self::Generators(d) => d.tolerance,
            Self::SignedPsd(_) => None,
        }
    }

    pub fn oracle<T: Real>(&self) -> Result<Box<dyn MembershipOracle<T>>> {
        Ok(match self {
            Self::Classified(d) => Box::new(d.to_cone::<T>()?),
            Self::Generators(d) => Box::new(d.to_cone::<T>()?),
            Self::SignedPsd(d) => Box::new(SignedPsdSet::new(BlockAlgebra::new(d.dims.clone())?)),
        })
    }
}

fn max_asymmetry(r: &ElementRecord) -> f64 {
    let mut worst = 0.0f64;
    for rows in &r.blocks {
        for (i, row) in rows.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                if let Some(w) = rows.get(j).and_then(|r| r.get(i)) {
                    worst = worst.max((z[0] - w[0]).abs()).max((z[1] + w[1]).abs());
                }
            }
        }
    }
    worst
}

fn load_record<T: Real>(r: &ElementRecord) -> Result<(BlockElement<T>, Vec<String>)> {
    let asym = max_asymmetry(r);
    let mut warnings = Vec::new();
    if asym > ASYMMETRY_WARNING {
        warnings.push(format!("input not hermitian (asymmetry {asym:.3e}); symmetrized"));
    }
    let e = r.to_element(T::infinity())?;
    Ok((e, warnings))
}

/// Element file: `{"blocks": [[[[re, im], ...], ...], ...]}`, symmetrized on load.
pub fn parse_element<T: Real>(text: &str) -> Result<(BlockElement<T>, Vec<String>)> {
    let rec: ElementRecord = parse_json(text)?;
    load_record(&rec).map_err(|e| parse_error("blocks", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str = r#"{"dims":[1,1],"poset":{"relations":[[1,2]]},"inner":[{"kind":"full"},{"kind":"full"}]}"#;

    #[test]
    fn chain_document() {
        let d = ConeSpecDocument::parse(CHAIN).unwrap();
        let cone: ClassifiedIsocone<f64> = d.to_cone().unwrap();
        assert!(cone.poset().lt(0, 1));
        let back = ConeSpecDocument::from_cone(&cone);
        assert_eq!(back, d);
    }

    #[test]
    fn fixed_point_with_normalization() {
        let text = r#"{"name":"q","dims":[2,1,1],"poset":{"relations":[[2,3],[3,1],[2,1]]},
            "inner":[{"kind":"cap","center":[0,0,2],"angle":0.7},{"kind":"full"},{"kind":"full"}]}"#;
        let a = ConeSpecDocument::parse(text).unwrap();
        assert_eq!(a.poset.relations, vec![[2, 3], [3, 1]]);
        assert_eq!(a.inner[0], InnerDoc::Cap { center: [0.0, 0.0, 1.0], angle: 0.7 });
        let s1 = a.to_json();
        let b = ConeSpecDocument::parse(&s1).unwrap();
        assert_eq!(a, b);
        assert_eq!(s1, b.to_json());

        let poly = r#"{"dims":[2],"inner":[{"kind":"polygon","normals":[[1,1,1],[0.3,-2,1],[-1,0.2,3]]}]}"#;
        let p = ConeSpecDocument::parse(poly).unwrap();
        assert_eq!(ConeSpecDocument::parse(&p.to_json()).unwrap().to_json(), p.to_json());
        let wide = r#"{"dims":[2],"inner":[{"kind":"cap","center":[1,0,0],"angle":2.0}]}"#;
        assert_eq!(ConeSpecDocument::parse(wide).unwrap().inner, vec![InnerDoc::Full]);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = r#"{"dims":[2],"inner":[{"kind":"cap","center":[0,0,1],"angle":"wide"}]}"#;
        let e = ConeSpecDocument::parse(bad).unwrap_err().to_string();
        assert!(e.contains("inner[0]") && e.contains("line"), "{e}");
        let cyc = r#"{"dims":[1,1],"poset":{"relations":[[1,2],[2,1]]}}"#;
        assert!(matches!(ConeSpecDocument::parse(cyc), Err(Error::Parse(_))));
        let range = r#"{"dims":[1,1],"poset":{"relations":[[0,1]]}}"#;
        assert!(ConeSpecDocument::parse(range).unwrap_err().to_string().contains("relations[0]"));
        let cap3 = r#"{"dims":[3],"inner":[{"kind":"cap","center":[0,0,1],"angle":0.5}]}"#;
        assert!(ConeSpecDocument::parse(cap3).is_err());
        assert!(ConeSpecDocument::parse(r#"{"dims":[1],"extra":1}"#).is_err());
    }

    #[test]
    fn oracle_kinds_and_elements() {
        let g = r#"{"kind":"generators","generators":[{"blocks":[[[[1,0],[0,0]],[[0,0],[0,0]]]]}]}"#;
        assert!(matches!(OracleDocument::parse(g).unwrap(), OracleDocument::Generators(_)));
        let s = r#"{"kind":"signed-psd","dims":[2]}"#;
        let o = OracleDocument::parse(s).unwrap().oracle::<f64>().unwrap();
        assert_eq!(o.algebra().dims(), &[2]);
        assert!(OracleDocument::parse(r#"{"kind":"mystery"}"#).is_err());

        let (e, w) = parse_element::<f64>(r#"{"blocks":[[[[0,0],[1,1e-9]],[[1,0],[1,0]]]]}"#).unwrap();
        assert_eq!(w.len(), 1);
        assert!(e.block(0).matrix()[(0, 1)].im.abs() < 1e-9);
        let (_, w) = parse_element::<f64>(r#"{"blocks":[[[[0,0]]],[[[1,0]]]]}"#).unwrap();
        assert!(w.is_empty());
    }
}
