//! Finite posets, their sums, and Hasse-diagram utilities.
//!
//! Elements are `0..size`. Sums flatten their parts in block order, so the
//! element `(block b, inner i)` lands at `offset(b) + i`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

/// Largest poset [`up_sets`] will enumerate.
pub const MAX_UPSET_SIZE: usize = 20;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Poset {
    size: usize,
    leq: Vec<bool>,
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poset({}; {:?})", self.size, self.strict_pairs())
    }
}

impl Poset {
    /// Discrete order on `n` points.
    pub fn antichain(n: usize) -> Self {
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        Self { size: n, leq }
    }

    /// `0 ≺ 1 ≺ … ≺ n−1`.
    pub fn chain(n: usize) -> Self {
        let mut leq = vec![false; n * n];
        for i in 0..n {
            for j in i..n {
                leq[i * n + j] = true;
            }
        }
        Self { size: n, leq }
    }

    /// Reflexive-transitive closure of `pairs` (x ⪯ y). Cycles are an error.
    pub fn from_relations(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(x, y) in pairs {
            if x >= n || y >= n {
                return Err(input(format!("relation ({x}, {y}) out of range for size {n}")));
            }
            leq[x * n + y] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        Self::from_matrix(n, leq)
    }

    /// Validates a full relation matrix (row-major, `leq[x*n+y]` ⇔ x ⪯ y).
    pub fn from_matrix(n: usize, leq: Vec<bool>) -> Result<Self> {
        if leq.len() != n * n {
            return Err(Error::Dimension { expected: n * n, found: leq.len() });
        }
        let p = Self { size: n, leq };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let n = self.size;
        for x in 0..n {
            if !self.leq(x, x) {
                return Err(input(format!("relation not reflexive at {x}")));
            }
            for y in 0..n {
                if x != y && self.leq(x, y) && self.leq(y, x) {
                    return Err(input(format!("relation not antisymmetric: {x} and {y}")));
                }
                if self.leq(x, y) {
                    for z in 0..n {
                        if self.leq(y, z) && !self.leq(x, z) {
                            return Err(input(format!(
                                "relation not transitive: {x} ⪯ {y} ⪯ {z}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.size + y]
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    pub fn incomparable(&self, x: usize, y: usize) -> bool {
        !self.comparable(x, y)
    }

    /// All `(x, y)` with `x ≺ y`.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.size;
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if self.lt(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// `{y : x ⪯ y}`.
    pub fn up_closure(&self, x: usize) -> Vec<usize> {
        (0..self.size).filter(|&y| self.leq(x, y)).collect()
    }

    /// `{y : x ≺ y}`.
    pub fn strict_up(&self, x: usize) -> Vec<usize> {
        (0..self.size).filter(|&y| self.lt(x, y)).collect()
    }

    pub fn strict_down(&self, x: usize) -> Vec<usize> {
        (0..self.size).filter(|&y| self.lt(y, x)).collect()
    }

    /// Every relation of `self` also holds in `other`.
    pub fn is_coarser_or_equal(&self, other: &Self) -> bool {
        self.size == other.size && self.leq.iter().zip(&other.leq).all(|(&a, &b)| !a || b)
    }

    /// Relations contained in the natural order of indices.
    pub fn refines_into_natural(&self) -> bool {
        self.strict_pairs().iter().all(|&(x, y)| x < y)
    }

    /// Restriction to `keep` (in the given order).
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let m = keep.len();
        let mut leq = vec![false; m * m];
        for (i, &x) in keep.iter().enumerate() {
            for (j, &y) in keep.iter().enumerate() {
                leq[i * m + j] = self.leq(x, y);
            }
        }
        Self { size: m, leq }
    }

    /// Embeds `self` on the positions `at` of an `n`-element poset; other points isolated.
    pub fn extend_isolated(&self, n: usize, at: &[usize]) -> Result<Self> {
        if at.len() != self.size || at.iter().any(|&i| i >= n) {
            return Err(input("embedding positions do not match the poset"));
        }
        let pairs: Vec<(usize, usize)> =
            self.strict_pairs().into_iter().map(|(x, y)| (at[x], at[y])).collect();
        Self::from_relations(n, &pairs)
    }
}

/// Disjoint union with `M ∥ N`.
pub fn cardinal_sum(m: &Poset, n: &Poset) -> Poset {
    lexicographic_sum(&Poset::antichain(2), &[m.clone(), n.clone()]).expect("two parts")
}

/// Disjoint union with `M ≺ N`.
pub fn ordinal_sum(m: &Poset, n: &Poset) -> Poset {
    lexicographic_sum(&Poset::chain(2), &[m.clone(), n.clone()]).expect("two parts")
}

/// Replaces each point `x` of `base` by `family[x]`.
pub fn lexicographic_sum(base: &Poset, family: &[Poset]) -> Result<Poset> {
    if family.len() != base.size() {
        return Err(Error::Dimension { expected: base.size(), found: family.len() });
    }
    let labels = sum_labels(family.iter().map(Poset::size));
    let n = labels.len();
    let mut leq = vec![false; n * n];
    for (i, &(bx, ix)) in labels.iter().enumerate() {
        for (j, &(by, iy)) in labels.iter().enumerate() {
            leq[i * n + j] = if bx == by {
                family[bx].leq(ix, iy)
            } else {
                base.lt(bx, by)
            };
        }
    }
    Poset::from_matrix(n, leq)
}

/// `(block, inner)` label of every element of a sum, in flattened order.
pub fn sum_labels(sizes: impl IntoIterator<Item = usize>) -> Vec<(usize, usize)> {
    sizes
        .into_iter()
        .enumerate()
        .flat_map(|(b, s)| (0..s).map(move |i| (b, i)))
        .collect()
}

/// Covering pairs `(x, y)`: `x ≺ y` with nothing strictly between.
pub fn hasse(p: &Poset) -> Vec<(usize, usize)> {
    let n = p.size();
    p.strict_pairs()
        .into_iter()
        .filter(|&(x, y)| !(0..n).any(|z| p.lt(x, z) && p.lt(z, y)))
        .collect()
}

/// Connectivity of the undirected cover graph. The empty poset counts as connected.
pub fn is_hasse_connected(p: &Poset) -> bool {
    let n = p.size();
    if n == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); n];
    for (x, y) in hasse(p) {
        adj[x].push(y);
        adj[y].push(x);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Up-sets as bitmasks (bit `x` set ⇔ `x` in the set).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpSetFamily {
    pub poset: Poset,
    pub sets: Vec<u32>,
}

impl UpSetFamily {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, mask: u32) -> bool {
        self.sets.binary_search(&mask).is_ok()
    }

    pub fn members(mask: u32, n: usize) -> Vec<usize> {
        (0..n).filter(|&i| mask >> i & 1 == 1).collect()
    }
}

pub fn is_up_set(p: &Poset, mask: u32) -> bool {
    let n = p.size();
    (0..n).all(|x| mask >> x & 1 == 0 || p.strict_up(x).iter().all(|&y| mask >> y & 1 == 1))
}

/// All up-sets, including `∅` and the full set, sorted by mask.
pub fn up_sets(p: &Poset) -> Result<UpSetFamily> {
    let n = p.size();
    if n > MAX_UPSET_SIZE {
        return Err(Error::Resource(format!(
            "up-set enumeration limited to {MAX_UPSET_SIZE} elements, got {n}"
        )));
    }
    let up_masks: Vec<u32> = (0..n)
        .map(|x| p.strict_up(x).iter().fold(0u32, |m, &y| m | 1 << y))
        .collect();
    let sets = (0..(1u32 << n))
        .filter(|&mask| (0..n).all(|x| mask >> x & 1 == 0 || mask & up_masks[x] == up_masks[x]))
        .collect();
    Ok(UpSetFamily { poset: p.clone(), sets })
}
