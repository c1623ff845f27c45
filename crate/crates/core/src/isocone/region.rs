//! Geodesically convex regions of the Bloch sphere and the M₂ cones they span.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::random::{random_direction, uniform};
use crate::scalar::Real;

pub type V3<T> = [T; 3];

pub fn dot3<T: Real>(a: &V3<T>, b: &V3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3<T: Real>(a: &V3<T>, b: &V3<T>) -> V3<T> {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm3<T: Real>(a: &V3<T>) -> T {
    dot3(a, a).sqrt()
}

pub fn scale3<T: Real>(a: &V3<T>, s: T) -> V3<T> {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn add3<T: Real>(a: &V3<T>, b: &V3<T>) -> V3<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub3<T: Real>(a: &V3<T>, b: &V3<T>) -> V3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Unit vector along `a`, or `None` for (near) zero input.
pub fn normalize3<T: Real>(a: &V3<T>) -> Option<V3<T>> {
    let n = norm3(a);
    if (n - T::one()).abs() <= T::epsilon() * T::lit(4.0) {
        // already unit: keep the bits so repeated normalization is idempotent
        return Some(*a);
    }
    (n > T::epsilon() * T::lit(16.0)).then(|| scale3(a, n.recip()))
}

/// Angle between two nonzero vectors, computed stably with atan2.
pub fn angle3<T: Real>(a: &V3<T>, b: &V3<T>) -> T {
    norm3(&cross3(a, b)).atan2(dot3(a, b))
}

/// Some unit vector orthogonal to `a`.
fn perpendicular<T: Real>(a: &V3<T>) -> V3<T> {
    let e = if a[0].abs() <= a[1].abs() && a[0].abs() <= a[2].abs() {
        [T::one(), T::zero(), T::zero()]
    } else if a[1].abs() <= a[2].abs() {
        [T::zero(), T::one(), T::zero()]
    } else {
        [T::zero(), T::zero(), T::one()]
    };
    normalize3(&cross3(a, &e)).expect("nonzero input")
}

pub fn rotate3<T: Real>(r: &[[T; 3]; 3], v: &V3<T>) -> V3<T> {
    [dot3(&r[0], v), dot3(&r[1], v), dot3(&r[2], v)]
}

pub fn transpose3<T: Real>(r: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut t = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = r[j][i];
        }
    }
    t
}

pub const MAX_POLYGON_NORMALS: usize = 32;

/// Region `K` of unit Bloch vectors. `Sphere` spans all of `Herm(2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BlochRegion<T> {
    Sphere,
    Cap { center: V3<T>, angle: T },
    Polygon { normals: Vec<V3<T>> },
}

impl<T: Real> BlochRegion<T> {
    /// Closed cap of geodesic radius `angle` around `center`.
    ///
    /// Caps wider than a hemisphere are not geodesically convex; the cone they
    /// span is all of `Herm(2)`, so they normalize to `Sphere`.
    pub fn cap(center: V3<T>, angle: T) -> Result<Self> {
        let c = normalize3(&center).ok_or_else(|| input("cap center must be nonzero"))?;
        if !angle.is_finite() || angle <= T::zero() || angle > T::PI() + T::epsilon() * T::lit(8.0) {
            return Err(input(format!("cap angle {angle} outside (0, π]")));
        }
        if angle > T::FRAC_PI_2() + T::epsilon() * T::lit(8.0) {
            return Ok(BlochRegion::Sphere);
        }
        Ok(BlochRegion::Cap { center: c, angle: angle.min(T::FRAC_PI_2()) })
    }

    /// Intersection of the closed hemispheres `{d : n·d ≥ 0}`.
    pub fn polygon(normals: Vec<V3<T>>) -> Result<Self> {
        if normals.len() > MAX_POLYGON_NORMALS {
            return Err(input(format!("polygon has {} normals (max {MAX_POLYGON_NORMALS})", normals.len())));
        }
        if normals.is_empty() {
            return Ok(BlochRegion::Sphere);
        }
        let normals = normals
            .iter()
            .map(|n| normalize3(n).ok_or_else(|| input("polygon normal must be nonzero")))
            .collect::<Result<Vec<_>>>()?;
        if min_norm_in_hull(&normals).is_none() {
            return Err(input("polygon region has empty interior"));
        }
        Ok(BlochRegion::Polygon { normals })
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self, BlochRegion::Sphere)
    }

    /// No pair `d, −d` lies in the region.
    pub fn is_antipode_free(&self) -> bool {
        match self {
            BlochRegion::Sphere => false,
            BlochRegion::Cap { angle, .. } => *angle < T::FRAC_PI_2(),
            BlochRegion::Polygon { normals } => normal_rank(normals) == 3,
        }
    }

    /// Signed margin of the traceless vector `v` against the cone over `K`
    /// (nonnegative exactly when `v ∈ ℝ₊K`); `+∞` for the sphere.
    pub fn cone_margin(&self, v: &V3<T>) -> T {
        match self {
            BlochRegion::Sphere => T::infinity(),
            BlochRegion::Cap { center, angle } => dot3(v, center) - norm3(v) * angle.cos(),
            BlochRegion::Polygon { normals } => {
                normals.iter().map(|n| dot3(n, v)).fold(T::infinity(), T::min)
            }
        }
    }

    pub fn contains(&self, d: &V3<T>, tol: T) -> bool {
        self.cone_margin(d) >= -tol
    }

    /// A direction in the interior (the "most interior" one for caps and polygons).
    pub fn interior_direction(&self) -> V3<T> {
        match self {
            BlochRegion::Sphere => [T::zero(), T::zero(), T::one()],
            BlochRegion::Cap { center, .. } => *center,
            BlochRegion::Polygon { normals } => {
                let p = min_norm_in_hull(normals).expect("validated on construction");
                normalize3(&p).expect("nonzero")
            }
        }
    }

    /// Exact `min_{n∈K} d·n`.
    pub fn min_dot(&self, d: &V3<T>) -> T {
        let dn = norm3(d);
        if dn == T::zero() {
            return T::zero();
        }
        match self {
            BlochRegion::Sphere => -dn,
            BlochRegion::Cap { center, angle } => dn * (angle3(d, center) + *angle).min(T::PI()).cos(),
            BlochRegion::Polygon { normals } => polygon_min_dot(normals, d),
        }
    }

    /// Region transported by the rotation `r`.
    pub fn rotated(&self, r: &[[T; 3]; 3]) -> Self {
        match self {
            BlochRegion::Sphere => BlochRegion::Sphere,
            BlochRegion::Cap { center, angle } => BlochRegion::Cap { center: rotate3(r, center), angle: *angle },
            BlochRegion::Polygon { normals } => {
                BlochRegion::Polygon { normals: normals.iter().map(|n| rotate3(r, n)).collect() }
            }
        }
    }

    /// Uniform direction in `K` (rejection for polygons, with an interior fallback).
    pub fn sample_inside<R: Rng + ?Sized>(&self, rng: &mut R) -> V3<T> {
        match self {
            BlochRegion::Sphere => random_direction(rng),
            BlochRegion::Cap { center, angle } => {
                let z: T = uniform(rng, angle.cos().to_f64_lossy(), 1.0);
                let phi: T = uniform(rng, 0.0, std::f64::consts::TAU);
                let e1 = perpendicular(center);
                let e2 = cross3(center, &e1);
                let s = (T::one() - z * z).max(T::zero()).sqrt();
                add3(&scale3(center, z), &add3(&scale3(&e1, s * phi.cos()), &scale3(&e2, s * phi.sin())))
            }
            BlochRegion::Polygon { normals } => {
                for _ in 0..256 {
                    let d = random_direction(rng);
                    if normals.iter().all(|n| dot3(n, &d) >= T::zero()) {
                        return d;
                    }
                }
                let c = self.interior_direction();
                let t: T = uniform(rng, 0.0, 1.0);
                self.boundary_toward(&c, &random_direction(rng)).map_or(c, |b| slerp(&c, &b, t))
            }
        }
    }

    /// Direction on `∂K`: walk from the interior direction toward a random one.
    pub fn sample_boundary<R: Rng + ?Sized>(&self, rng: &mut R) -> V3<T> {
        let c = self.interior_direction();
        for _ in 0..16 {
            if let Some(b) = self.boundary_toward(&c, &random_direction(rng)) {
                return b;
            }
        }
        c
    }

    /// Last point of `K` on the geodesic from interior `c` toward `w`.
    fn boundary_toward(&self, c: &V3<T>, w: &V3<T>) -> Option<V3<T>> {
        if self.is_sphere() {
            return None;
        }
        let w = normalize3(&sub3(w, &scale3(c, dot3(c, w))))?;
        let at = |t: T| add3(&scale3(c, t.cos()), &scale3(&w, t.sin()));
        let inside = |t: T| self.cone_margin(&at(t)) >= T::zero();
        if inside(T::PI()) {
            return None;
        }
        let (mut lo, mut hi) = (T::zero(), T::PI());
        for _ in 0..60 {
            let mid = (lo + hi) * T::lit(0.5);
            if inside(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(at(lo))
    }

    /// Smallest cap containing every direction in `points`, or `Sphere` if no
    /// cap of radius ≤ π/2 does.
    pub fn enclosing_cap<R: Rng + ?Sized>(points: &[V3<T>], rng: &mut R) -> Option<Self> {
        use rand::seq::SliceRandom;
        let mut pts: Vec<V3<T>> = points.iter().filter_map(normalize3).collect();
        if pts.is_empty() {
            return None;
        }
        pts.shuffle(rng);
        let slack = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
        let covers = |c: &(V3<T>, T), p: &V3<T>| angle3(&c.0, p) <= c.1 + slack;
        let mut cap = (pts[0], T::zero());
        for i in 1..pts.len() {
            if covers(&cap, &pts[i]) {
                continue;
            }
            cap = (pts[i], T::zero());
            for j in 0..i {
                if covers(&cap, &pts[j]) {
                    continue;
                }
                cap = cap_two(&pts[i], &pts[j])?;
                for l in 0..j {
                    if !covers(&cap, &pts[l]) {
                        cap = cap_three(&pts[i], &pts[j], &pts[l])?;
                    }
                }
            }
        }
        let (center, angle) = cap;
        if angle > T::FRAC_PI_2() + T::lit(1e-9) || !pts.iter().all(|p| covers(&cap, p)) {
            return Some(BlochRegion::Sphere);
        }
        let angle = angle.max(T::epsilon());
        Some(BlochRegion::Cap { center, angle: angle.min(T::FRAC_PI_2()) })
    }
}

fn slerp<T: Real>(a: &V3<T>, b: &V3<T>, t: T) -> V3<T> {
    let m = add3(&scale3(a, T::one() - t), &scale3(b, t));
    normalize3(&m).unwrap_or(*a)
}

fn cap_two<T: Real>(a: &V3<T>, b: &V3<T>) -> Option<(V3<T>, T)> {
    let c = normalize3(&add3(a, b))?;
    Some((c, angle3(&c, a).max(angle3(&c, b))))
}

fn cap_three<T: Real>(a: &V3<T>, b: &V3<T>, c: &V3<T>) -> Option<(V3<T>, T)> {
    let n = cross3(&sub3(b, a), &sub3(c, a));
    let mut n = normalize3(&n)?;
    if dot3(&n, a) < T::zero() {
        n = scale3(&n, -T::one());
    }
    let r = angle3(&n, a).max(angle3(&n, b)).max(angle3(&n, c));
    Some((n, r))
}

fn normal_rank<T: Real>(normals: &[V3<T>]) -> usize {
    let tol = T::lit(1e-10).max(T::epsilon() * T::lit(64.0));
    let mut best = 1;
    for i in 0..normals.len() {
        for j in i + 1..normals.len() {
            let c = cross3(&normals[i], &normals[j]);
            if norm3(&c) > tol {
                best = best.max(2);
                if normals.iter().any(|n| dot3(&c, n).abs() > tol) {
                    return 3;
                }
            }
        }
    }
    best
}

/// Minimum-norm point of the convex hull of `pts`, if it is nonzero
/// (equivalently: some `d` has `n·d > 0` for every `n`).
pub(crate) fn min_norm_in_hull<T: Real>(pts: &[V3<T>]) -> Option<V3<T>> {
    let mut best: Option<V3<T>> = None;
    let mut consider = |p: V3<T>| {
        if best.is_none_or(|b| norm3(&p) < norm3(&b)) {
            best = Some(p);
        }
    };
    let m = pts.len();
    for i in 0..m {
        consider(pts[i]);
        for j in i + 1..m {
            if let Some(p) = face_point(&[pts[i], pts[j]]) {
                consider(p);
            }
            for l in j + 1..m {
                if let Some(p) = face_point(&[pts[i], pts[j], pts[l]]) {
                    consider(p);
                }
            }
        }
    }
    let p = best?;
    let r2 = dot3(&p, &p);
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
    if r2.sqrt() <= tol {
        return None;
    }
    pts.iter().all(|n| dot3(n, &p) >= r2 - tol).then_some(p)
}

/// Closest point to the origin on the affine hull of `face`, if it has
/// nonnegative barycentric coordinates.
fn face_point<T: Real>(face: &[V3<T>]) -> Option<V3<T>> {
    let base = face[0];
    let dirs: Vec<V3<T>> = face[1..].iter().map(|p| sub3(p, &base)).collect();
    let k = dirs.len();
    // Normal equations G μ = −Dᵀ base.
    let mut g = [[T::zero(); 2]; 2];
    let mut r = [T::zero(); 2];
    for a in 0..k {
        for b in 0..k {
            g[a][b] = dot3(&dirs[a], &dirs[b]);
        }
        r[a] = -dot3(&dirs[a], &base);
    }
    let mu: Vec<T> = if k == 1 {
        if g[0][0] <= T::epsilon() {
            return None;
        }
        vec![r[0] / g[0][0]]
    } else {
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        if det.abs() <= T::epsilon() * T::lit(16.0) * g[0][0] * g[1][1] {
            return None;
        }
        vec![(r[0] * g[1][1] - g[0][1] * r[1]) / det, (g[0][0] * r[1] - g[1][0] * r[0]) / det]
    };
    let tiny = T::epsilon() * T::lit(16.0);
    if mu.iter().any(|&m| m < -tiny) || mu.iter().copied().sum::<T>() > T::one() + tiny {
        return None;
    }
    let mut p = base;
    for (d, m) in dirs.iter().zip(&mu) {
        p = add3(&p, &scale3(d, *m));
    }
    Some(p)
}

fn polygon_min_dot<T: Real>(normals: &[V3<T>], d: &V3<T>) -> T {
    let tiny = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
    let inside = |u: &V3<T>| normals.iter().all(|n| dot3(n, u) >= -tiny);
    let dn = norm3(d);
    let neg = scale3(d, -dn.recip());
    if inside(&neg) {
        return -dn;
    }
    let mut best = T::infinity();
    let mut consider = |u: &V3<T>| {
        if inside(u) {
            best = best.min(dot3(d, u));
        }
    };
    for (i, n) in normals.iter().enumerate() {
        // minimizer of d·u on the great circle n·u = 0
        let w = add3(&scale3(d, -T::one()), &scale3(n, dot3(d, n)));
        match normalize3(&w) {
            Some(u) if norm3(&w) > tiny * dn => consider(&u),
            _ => {
                let e1 = perpendicular(n);
                consider(&e1);
                consider(&cross3(n, &e1));
            }
        }
        for m in &normals[i + 1..] {
            if let Some(v) = normalize3(&cross3(n, m)) {
                consider(&v);
                consider(&scale3(&v, -T::one()));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    const Z: V3<f64> = [0.0, 0.0, 1.0];

    #[test]
    fn cap_normalization() {
        assert!(BlochRegion::cap(Z, 2.0).unwrap().is_sphere());
        assert!(BlochRegion::cap(Z, PI).unwrap().is_sphere());
        let h = BlochRegion::cap(Z, FRAC_PI_2).unwrap();
        assert!(!h.is_sphere() && !h.is_antipode_free());
        assert!(BlochRegion::cap(Z, FRAC_PI_4).unwrap().is_antipode_free());
        assert!(BlochRegion::cap(Z, 0.0).is_err());
        assert!(BlochRegion::cap([0.0; 3], 0.3).is_err());
    }

    #[test]
    fn polygon_validation() {
        let oct = BlochRegion::polygon(vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert!(oct.is_antipode_free());
        let d = oct.interior_direction();
        let s = 1.0 / 3f64.sqrt();
        assert!((d[0] - s).abs() < 1e-12 && (d[2] - s).abs() < 1e-12);
        assert!(BlochRegion::polygon(vec![Z, [0.0, 0.0, -1.0]]).is_err());
        let wedge = BlochRegion::polygon(vec![Z, [1.0, 0.0, 0.0]]).unwrap();
        assert!(!wedge.is_antipode_free());
        assert!(BlochRegion::polygon(vec![[1.0, 0.0, 0.0], [-0.5, 0.8, 0.0], [-0.5, -0.8, 0.0]]).is_err());
    }

    #[test]
    fn cap_min_dot_closed_form() {
        let k = BlochRegion::cap(Z, FRAC_PI_4).unwrap();
        assert!(k.min_dot(&Z) > 0.0);
        assert!(k.min_dot(&[1.0, 0.0, 0.0]) < 0.0);
        assert_eq!(k.min_dot(&[0.0; 3]), 0.0);
    }

    #[test]
    fn polygon_min_dot_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let c: V3<f64> = random_direction(&mut rng);
            let normals: Vec<V3<f64>> = (0..4)
                .map(|_| {
                    let r: V3<f64> = random_direction(&mut rng);
                    normalize3(&add3(&scale3(&c, 1.2), &r)).unwrap()
                })
                .collect();
            let Ok(k) = BlochRegion::polygon(normals) else { continue };
            let d: V3<f64> = random_direction(&mut rng);
            let exact = k.min_dot(&d);
            let mut brute = f64::INFINITY;
            for _ in 0..20000 {
                let u: V3<f64> = random_direction(&mut rng);
                if k.contains(&u, 0.0) {
                    brute = brute.min(dot3(&d, &u));
                }
            }
            assert!(exact <= brute + 1e-12, "exact {exact} above sampled {brute}");
            assert!(brute - exact < 0.1, "exact {exact} far below sampled {brute}");
        }
    }

    #[test]
    fn hemisphere_min_dot_on_boundary() {
        let h = BlochRegion::polygon(vec![Z]).unwrap();
        assert!(h.min_dot(&Z).abs() < 1e-15);
        assert!((h.min_dot(&[0.0, 0.0, -2.0]) + 2.0).abs() < 1e-15);
    }

    #[test]
    fn sampling_stays_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let k = BlochRegion::<f64>::cap([1.0, 1.0, 0.0], 0.4).unwrap();
        for _ in 0..200 {
            assert!(k.contains(&k.sample_inside(&mut rng), 1e-12));
            let b = k.sample_boundary(&mut rng);
            assert!(k.cone_margin(&b).abs() < 1e-9);
        }
    }

    #[test]
    fn enclosing_cap_recovers_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let k = BlochRegion::cap([0.3, -0.2, 1.0], 0.7).unwrap();
        let mut pts: Vec<V3<f64>> = (0..400).map(|_| k.sample_inside(&mut rng)).collect();
        pts.extend((0..400).map(|_| k.sample_boundary(&mut rng)));
        let BlochRegion::Cap { center, angle } = BlochRegion::enclosing_cap(&pts, &mut rng).unwrap() else {
            panic!("expected a cap")
        };
        assert!((angle - 0.7).abs() < 1e-3);
        let BlochRegion::Cap { center: c0, .. } = k else { unreachable!() };
        assert!(angle3(&center, &c0) < 1e-2);
    }
}
