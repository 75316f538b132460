//! Swap rounding of a convex combination of bases to a single base.
//!
//! Bases are merged pairwise: `C₁ = B₁`, then `C_{i+1}` merges `C_i` (weight
//! `γ_i = β₁ + … + β_i`) with `B_{i+1}`. A merge repeatedly picks `i ∈ B1 ∖ B2` and a
//! partner `j ∈ B2 ∖ B1` that can be exchanged both ways, then draws one uniform number:
//! below `β1/(β1+β2)` it sets `B2 ← B2 − j + i`, otherwise `B1 ← B1 − i + j`.
//! All paths draw exactly one number per exchange, so with equal seeds and equal pair
//! order they produce identical outputs.

mod graphic;
mod rbtree;

pub use graphic::{merge_bases_graphic, GadgetTree, GraphicMerge, MergeStats};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matroid::{MatroidInstance, PartitionMatroid, UnionFind};
use crate::oracle::FractionalPoint;
use crate::set::ElementSet;

/// `Σᵢ βᵢ·1_{Bᵢ}` with every `Bᵢ` a base and `Σ βᵢ = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BaseCombination {
    bases: Vec<ElementSet>,
    weights: Vec<f64>,
}

impl BaseCombination {
    pub fn new(matroid: &MatroidInstance, bases: Vec<ElementSet>, weights: Vec<f64>) -> Result<Self> {
        if bases.is_empty() || bases.len() != weights.len() {
            return Err(Error::Combination(format!(
                "{} bases with {} weights",
                bases.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Combination(format!("weight {w} is not positive")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Combination(format!("weights sum to {total}")));
        }
        if let Some(i) = bases.iter().position(|b| !matroid.is_base(b)) {
            return Err(Error::Combination(format!("set {i} is not a base")));
        }
        Ok(Self { bases, weights })
    }

    pub fn bases(&self) -> &[ElementSet] {
        &self.bases
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    /// The point `Σᵢ βᵢ·1_{Bᵢ}` over a ground set of size `n`.
    pub fn point(&self, n: usize) -> FractionalPoint {
        let mut coords = vec![0.0; n];
        for (b, &w) in self.bases.iter().zip(&self.weights) {
            for &e in b.iter() {
                coords[e] += w;
            }
        }
        for c in &mut coords {
            *c = c.clamp(0.0, 1.0);
        }
        FractionalPoint::new(coords).expect("clamped into [0,1]")
    }
}

/// Which `i ∈ B1 ∖ B2` the generic merge exchanges next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PairOrder {
    /// The smallest element.
    #[default]
    LowestIndex,
    /// Graphic only: the smallest edge of `B1 ∖ B2` that touches a leaf of `B1` once the
    /// common edges are contracted. This is the order the graphic fast path uses.
    LeafEdge,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundingPath {
    /// Fast path for the matroid's variant.
    #[default]
    Auto,
    /// Brute-force exchange partners in [`PairOrder::LowestIndex`] order.
    Generic,
    /// Brute-force exchange partners in [`PairOrder::LeafEdge`] order.
    GenericLeafEdge,
}

fn check_pair(matroid: &MatroidInstance, b1: &ElementSet, b2: &ElementSet, beta1: f64, beta2: f64) -> Result<()> {
    if !(beta1 > 0.0 && beta2 > 0.0 && beta1.is_finite() && beta2.is_finite()) {
        return Err(Error::Combination(format!("weights {beta1}, {beta2} must be positive")));
    }
    if !matroid.is_base(b1) || !matroid.is_base(b2) {
        return Err(Error::Combination("merge inputs must be bases".into()));
    }
    Ok(())
}

/// Generic merge with brute-force exchange partners; returns the base and the number of
/// exchanges.
pub fn merge_bases<R: Rng + ?Sized>(
    matroid: &MatroidInstance,
    beta1: f64,
    b1: &ElementSet,
    beta2: f64,
    b2: &ElementSet,
    order: PairOrder,
    rng: &mut R,
) -> Result<(ElementSet, usize)> {
    check_pair(matroid, b1, b2, beta1, beta2)?;
    let graph = match (order, matroid) {
        (PairOrder::LeafEdge, MatroidInstance::Graphic(g)) => Some(g),
        (PairOrder::LeafEdge, _) => {
            return Err(Error::param("leaf-edge order needs a graphic matroid"));
        }
        _ => None,
    };
    let p = beta1 / (beta1 + beta2);
    let (mut b1, mut b2) = (b1.clone(), b2.clone());
    let mut swaps = 0;
    while b1 != b2 {
        let diff = b1.difference(&b2);
        let i = match graph {
            None => diff[0],
            Some(g) => {
                let mut dsu = UnionFind::new(g.vertices());
                for &c in b1.intersection(&b2).iter() {
                    let (u, v) = g.edge(c);
                    dsu.union(u, v);
                }
                let mut degree = vec![0usize; g.vertices()];
                for &e in diff.iter() {
                    let (u, v) = g.edge(e);
                    degree[dsu.find(u)] += 1;
                    degree[dsu.find(v)] += 1;
                }
                *diff
                    .iter()
                    .find(|&&e| {
                        let (u, v) = g.edge(e);
                        degree[dsu.find(u)] == 1 || degree[dsu.find(v)] == 1
                    })
                    .expect("a nonempty tree has a leaf")
            }
        };
        let j = matroid.find_swap_pair_bruteforce(&b1, &b2, i)?;
        if rng.gen::<f64>() < p {
            b2.remove(j);
            b2.insert(i);
        } else {
            b1.remove(i);
            b1.insert(j);
        }
        swaps += 1;
    }
    Ok((b1, swaps))
}

/// Partition fast path: within each part the elements of `B1 ∖ B2` and `B2 ∖ B1` are
/// paired in ascending order, and pairs are resolved in ascending order of their `B1`
/// element. This reproduces the generic merge's choices exactly.
pub fn merge_bases_partition<R: Rng + ?Sized>(
    matroid: &PartitionMatroid,
    beta1: f64,
    b1: &ElementSet,
    beta2: f64,
    b2: &ElementSet,
    rng: &mut R,
) -> Result<(ElementSet, usize)> {
    let wrapped = MatroidInstance::Partition(matroid.clone());
    check_pair(&wrapped, b1, b2, beta1, beta2)?;
    let p = beta1 / (beta1 + beta2);
    let parts = matroid.budgets().len();
    let mut only1 = vec![Vec::new(); parts];
    let mut only2 = vec![Vec::new(); parts];
    for &e in b1.difference(b2).iter() {
        only1[matroid.part_of(e)].push(e);
    }
    for &e in b2.difference(b1).iter() {
        only2[matroid.part_of(e)].push(e);
    }
    let mut pairs: Vec<(usize, usize)> = only1
        .iter()
        .zip(&only2)
        .flat_map(|(a, b)| a.iter().copied().zip(b.iter().copied()))
        .collect();
    pairs.sort_unstable();
    let mut out: Vec<usize> = b1.intersection(b2).into_vec();
    for &(i, j) in &pairs {
        out.push(if rng.gen::<f64>() < p { i } else { j });
    }
    Ok((ElementSet::from_unsorted(out), pairs.len()))
}

/// Merges with the path chosen by `path`.
pub fn merge_with<R: Rng + ?Sized>(
    matroid: &MatroidInstance,
    beta1: f64,
    b1: &ElementSet,
    beta2: f64,
    b2: &ElementSet,
    path: RoundingPath,
    rng: &mut R,
) -> Result<(ElementSet, usize)> {
    match (path, matroid) {
        (RoundingPath::Auto, MatroidInstance::Partition(p)) => merge_bases_partition(p, beta1, b1, beta2, b2, rng),
        (RoundingPath::Auto, MatroidInstance::Graphic(g)) => {
            merge_bases_graphic(g, beta1, b1, beta2, b2, rng).map(|(b, s)| (b, s.swaps))
        }
        (RoundingPath::Generic, _) => merge_bases(matroid, beta1, b1, beta2, b2, PairOrder::LowestIndex, rng),
        (RoundingPath::GenericLeafEdge, _) => merge_bases(matroid, beta1, b1, beta2, b2, PairOrder::LeafEdge, rng),
    }
}

/// Rounds `comb` to one base.
pub fn swap_round<R: Rng + ?Sized>(
    matroid: &MatroidInstance,
    comb: &BaseCombination,
    path: RoundingPath,
    rng: &mut R,
) -> Result<ElementSet> {
    let mut current = comb.bases[0].clone();
    let mut gamma = comb.weights[0];
    for (b, &beta) in comb.bases.iter().zip(&comb.weights).skip(1) {
        current = if current == *b {
            current
        } else {
            merge_with(matroid, gamma, &current, beta, b, path, rng)?.0
        };
        gamma += beta;
    }
    Ok(current)
}

#[cfg(test)]
mod tests;
