//! Uniform random recursive trees and forests, the relabelling map `Φ`
//! between edge-labelled forests and increasing forests, and the couplings
//! built on top of them.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::forest::{LabeledEdge, PlainRootedForest, RootedForest, RootedLabeledForest};

/// A draw from `URRF_k(n)` (a `URRT(n)` when `k = 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UrrfSample {
    pub n: usize,
    pub k: usize,
    /// Increasing forest with roots exactly `1..=k`.
    pub forest: PlainRootedForest,
    /// `(new vertex, chosen parent)` in insertion order.
    pub attachment_order: Vec<(usize, usize)>,
}

impl UrrfSample {
    /// Rebuilds the forest from the attachment history.
    pub fn replay(&self) -> PlainRootedForest {
        let mut parents = vec![None; self.n];
        for &(v, p) in &self.attachment_order {
            parents[v - 1] = Some(p);
        }
        PlainRootedForest::from_parents_unchecked(parents)
    }
}

/// `URRT(n)`: vertex `j + 1` attaches to a uniform vertex of `1..=j`.
pub fn sample_urrt<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UrrfSample> {
    if n == 0 {
        return Err(domain("URRT needs n >= 1"));
    }
    sample_urrf(n, 1, rng)
}

/// `URRF_k(n)`: `k` isolated roots `1..=k`, then each new vertex attaches to a
/// uniformly chosen existing vertex.
pub fn sample_urrf<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<UrrfSample> {
    if k == 0 || k > n {
        return Err(domain(format!("URRF needs 1 <= k <= n, got n = {n}, k = {k}")));
    }
    let mut parents = vec![None; n];
    let mut attachment_order = Vec::with_capacity(n - k);
    for v in k + 1..=n {
        let p = rng.random_range(1..v);
        parents[v - 1] = Some(p);
        attachment_order.push((v, p));
    }
    Ok(UrrfSample {
        n,
        k,
        forest: PlainRootedForest::from_parents_unchecked(parents),
        attachment_order,
    })
}

/// The relabelling `Φ`: roots `x_1 < ... < x_k` become `1..=k`, a non-root
/// whose outgoing edge has label `l` becomes `n - l + 1`, and edge labels are
/// dropped. The image of any element of `F_{n,n-k}` lies in `R_{n,k}`.
pub fn phi(f: &RootedLabeledForest) -> Result<PlainRootedForest> {
    f.validate()?;
    let n = f.n();
    let mut relabel = vec![0usize; n + 1];
    for (j, r) in f.roots().into_iter().enumerate() {
        relabel[r] = j + 1;
    }
    for v in 1..=n {
        if let Some(l) = f.label_of(v) {
            relabel[v] = n - l + 1;
        }
    }
    let mut parents = vec![None; n];
    for v in 1..=n {
        if let Some(p) = f.parent(v) {
            parents[relabel[v] - 1] = Some(relabel[p]);
        }
    }
    Ok(PlainRootedForest::from_parents_unchecked(parents))
}

/// A uniform element of `Φ^{-1}(target)`.
///
/// The canonical preimage keeps the target's vertex names and labels the edge
/// leaving `v` with `n - v + 1`. Every other preimage is obtained from it by a
/// vertex permutation that keeps the roots in increasing order, and there are
/// `n!/k!` of those; a uniform shuffle whose first `k` entries are sorted
/// picks one uniformly.
pub fn phi_fiber_sample<R: Rng + ?Sized>(target: &PlainRootedForest, rng: &mut R) -> Result<RootedLabeledForest> {
    if !target.is_recursive_forest() {
        return Err(Error::Validation(
            "target must be increasing with roots 1..=k".into(),
        ));
    }
    let n = target.n();
    let k = target.tree_count();
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.shuffle(rng);
    perm[..k].sort_unstable();
    let edges: Vec<LabeledEdge> = target
        .edges()
        .into_iter()
        .map(|(child, parent)| LabeledEdge {
            tail: perm[child - 1],
            head: perm[parent - 1],
            label: n - child + 1,
        })
        .collect();
    RootedLabeledForest::from_edges(n, &edges)
}

/// Graph structure of a Kingman forest of `G(n, p)` conditional on it having
/// `tree_count` trees: a `URRF_{tree_count}(n)` draw.
pub fn sample_kingman_forest_structure<R: Rng + ?Sized>(
    n: usize,
    tree_count: usize,
    rng: &mut R,
) -> Result<PlainRootedForest> {
    Ok(sample_urrf(n, tree_count, rng)?.forest)
}

/// Ball counts of a Pólya urn.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UrnState {
    pub counts: Vec<u64>,
}

impl UrnState {
    pub fn colours(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Standard Pólya urn: one ball per colour, then `steps` times add a ball of a
/// colour drawn with probability proportional to its current count.
pub fn polya_urn<R: Rng + ?Sized>(k: usize, steps: u64, rng: &mut R) -> Result<UrnState> {
    if k == 0 {
        return Err(domain("Pólya urn needs at least one colour"));
    }
    let mut counts = vec![1u64; k];
    let mut total = k as u64;
    for _ in 0..steps {
        let mut ball = rng.random_range(0..total);
        let colour = counts
            .iter()
            .position(|&c| {
                if ball < c {
                    true
                } else {
                    ball -= c;
                    false
                }
            })
            .expect("ball index below total");
        counts[colour] += 1;
        total += 1;
    }
    Ok(UrnState { counts })
}

/// Deletes every edge of a recursive tree with both endpoints in `1..=c`,
/// leaving a forest whose roots are exactly `1..=c`.
///
/// In an increasing tree the vertices `1..=c` span a subtree containing the
/// root, so exactly `c - 1` edges go.
pub fn delete_root_block_edges(tree: &UrrfSample, c: usize) -> Result<PlainRootedForest> {
    if tree.k != 1 {
        return Err(domain("edge deletion coupling expects a recursive tree (k = 1)"));
    }
    if c == 0 || c > tree.n {
        return Err(domain(format!("need 1 <= c <= n, got c = {c}, n = {}", tree.n)));
    }
    let parents = (1..=tree.n)
        .map(|v| tree.forest.parent(v).filter(|_| v > c))
        .collect();
    Ok(PlainRootedForest::from_parents_unchecked(parents))
}
