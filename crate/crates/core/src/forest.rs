//! Rooted forests on `{1..n}`.
//!
//! Edges always point from child (tail) to parent (head). A
//! [`RootedLabeledForest`] additionally carries edge labels `1..=m` that
//! decrease along every root-to-leaf path; these are exactly the forests a
//! coalescent builds when the `j`-th merge gets label `j`. A
//! [`PlainRootedForest`] has no labels and is the home of increasing
//! (recursive) forests.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Read access shared by both forest flavours. Vertices are 1-based.
pub trait RootedForest {
    fn n(&self) -> usize;

    /// Parent of `v`, `None` for roots. `v` must be in `1..=n`.
    fn parent(&self, v: usize) -> Option<usize>;

    fn is_root(&self, v: usize) -> bool {
        self.parent(v).is_none()
    }

    /// Roots in increasing order.
    fn roots(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&v| self.is_root(v)).collect()
    }

    fn tree_count(&self) -> usize {
        (1..=self.n()).filter(|&v| self.is_root(v)).count()
    }

    /// Distance of every vertex to the root of its tree (index `v - 1`).
    fn depths(&self) -> Vec<usize> {
        let n = self.n();
        let mut depth = vec![usize::MAX; n];
        let mut path = Vec::new();
        for v in 1..=n {
            let mut cur = v;
            while depth[cur - 1] == usize::MAX {
                match self.parent(cur) {
                    Some(up) => {
                        path.push(cur);
                        cur = up;
                    }
                    None => depth[cur - 1] = 0,
                }
            }
            let mut d = depth[cur - 1];
            while let Some(w) = path.pop() {
                d += 1;
                depth[w - 1] = d;
            }
        }
        depth
    }

    fn height_of(&self, v: usize) -> Result<usize> {
        if v == 0 || v > self.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n() });
        }
        let mut h = 0;
        let mut cur = v;
        while let Some(up) = self.parent(cur) {
            h += 1;
            cur = up;
        }
        Ok(h)
    }

    /// Maximum vertex height; 0 for an edgeless forest.
    fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Root of the tree containing each vertex (index `v - 1`).
    fn root_map(&self) -> Vec<usize> {
        let n = self.n();
        let mut root = vec![0usize; n];
        let mut path = Vec::new();
        for v in 1..=n {
            let mut cur = v;
            while root[cur - 1] == 0 {
                match self.parent(cur) {
                    Some(up) => {
                        path.push(cur);
                        cur = up;
                    }
                    None => root[cur - 1] = cur,
                }
            }
            let r = root[cur - 1];
            for w in path.drain(..) {
                root[w - 1] = r;
            }
        }
        root
    }

    /// Tree sizes, one per root, in increasing root order.
    fn tree_sizes(&self) -> Vec<usize> {
        let mut count = vec![0usize; self.n()];
        for r in self.root_map() {
            count[r - 1] += 1;
        }
        self.roots().into_iter().map(|r| count[r - 1]).collect()
    }

    /// Parent map in vertex order with 0 for roots; injective on forests of a
    /// given `n`, so usable as a category key.
    fn shape_key(&self) -> Vec<u8> {
        (1..=self.n()).map(|v| self.parent(v).unwrap_or(0) as u8).collect()
    }
}

fn check_acyclic<F: RootedForest + ?Sized>(f: &F) -> Result<()> {
    let n = f.n();
    for v in 1..=n {
        let mut cur = v;
        let mut steps = 0;
        while let Some(up) = f.parent(cur) {
            steps += 1;
            if steps > n {
                return Err(Error::Validation(format!("cycle through vertex {v}")));
            }
            cur = up;
        }
    }
    Ok(())
}

/// A directed, labelled forest edge `tail -> head`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabeledEdge {
    pub tail: usize,
    pub head: usize,
    pub label: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Up {
    head: usize,
    label: usize,
}

/// An element of `F_{n,m}`: a rooted forest with `m` edges labelled
/// bijectively by `1..=m`, labels decreasing from each root downward.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootedLabeledForest {
    n: usize,
    up: Vec<Option<Up>>,
    edge_count: usize,
}

impl RootedForest for RootedLabeledForest {
    fn n(&self) -> usize {
        self.n
    }

    fn parent(&self, v: usize) -> Option<usize> {
        self.up[v - 1].map(|u| u.head)
    }
}

impl RootedLabeledForest {
    /// `n` isolated roots.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            up: vec![None; n],
            edge_count: 0,
        }
    }

    pub fn from_edges(n: usize, edges: &[LabeledEdge]) -> Result<Self> {
        let mut f = Self::empty(n);
        for e in edges {
            for v in [e.tail, e.head] {
                if v == 0 || v > n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if f.up[e.tail - 1].is_some() {
                return Err(Error::Validation(format!("vertex {} has two parents", e.tail)));
            }
            f.up[e.tail - 1] = Some(Up {
                head: e.head,
                label: e.label,
            });
            f.edge_count += 1;
        }
        f.validate()?;
        Ok(f)
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Label of the edge leaving `v`, if `v` is not a root.
    pub fn label_of(&self, v: usize) -> Option<usize> {
        self.up[v - 1].map(|u| u.label)
    }

    /// Edges sorted by label.
    pub fn edges(&self) -> Vec<LabeledEdge> {
        let mut edges: Vec<_> = self
            .up
            .iter()
            .enumerate()
            .filter_map(|(i, u)| {
                u.map(|u| LabeledEdge {
                    tail: i + 1,
                    head: u.head,
                    label: u.label,
                })
            })
            .collect();
        edges.sort_by_key(|e| e.label);
        edges
    }

    /// Adds `tail -> head` with the next label, making `tail` a non-root.
    /// Returns the new label.
    pub fn merge(&mut self, tail: usize, head: usize) -> Result<usize> {
        for v in [tail, head] {
            if v == 0 || v > self.n {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        if tail == head {
            return Err(Error::InvalidMerge(format!("cannot merge root {tail} with itself")));
        }
        if !self.is_root(tail) {
            return Err(Error::InvalidMerge(format!("tail {tail} is not a root")));
        }
        if !self.is_root(head) {
            return Err(Error::InvalidMerge(format!("head {head} is not a root")));
        }
        self.edge_count += 1;
        self.up[tail - 1] = Some(Up {
            head,
            label: self.edge_count,
        });
        Ok(self.edge_count)
    }

    /// Non-mutating form of [`merge`](Self::merge).
    pub fn merged(&self, tail: usize, head: usize) -> Result<Self> {
        let mut f = self.clone();
        f.merge(tail, head)?;
        Ok(f)
    }

    /// Undo the most recent merge, whose tail was `tail`.
    fn unmerge(&mut self, tail: usize) {
        debug_assert_eq!(self.label_of(tail), Some(self.edge_count));
        self.up[tail - 1] = None;
        self.edge_count -= 1;
    }

    /// Checks acyclicity, the label bijection onto `1..=m`, and that labels
    /// decrease from parent edge to child edge.
    pub fn validate(&self) -> Result<()> {
        check_acyclic(self)?;
        let m = self.edge_count;
        let mut seen = vec![false; m + 1];
        for (i, up) in self.up.iter().enumerate() {
            let Some(up) = up else { continue };
            if up.label == 0 || up.label > m || std::mem::replace(&mut seen[up.label], true) {
                return Err(Error::Validation(format!("labels are not a bijection onto 1..={m}")));
            }
            if let Some(above) = self.label_of(up.head) {
                if above <= up.label {
                    return Err(Error::Validation(format!(
                        "label {} below vertex {} is not smaller than the label {above} above it",
                        up.label,
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Category key that distinguishes every element of `F_{n,m}`.
    pub fn labeled_key(&self) -> Vec<(u8, u8)> {
        self.up
            .iter()
            .map(|u| u.map_or((0, 0), |u| (u.head as u8, u.label as u8)))
            .collect()
    }

    pub fn to_plain(&self) -> PlainRootedForest {
        PlainRootedForest {
            n: self.n,
            parent: self.up.iter().map(|u| u.map(|u| u.head)).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct LabeledRepr {
    n: usize,
    edges: Vec<LabeledEdge>,
}

impl Serialize for RootedLabeledForest {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LabeledRepr {
            n: self.n,
            edges: self.edges(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RootedLabeledForest {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = LabeledRepr::deserialize(d)?;
        Self::from_edges(repr.n, &repr.edges).map_err(serde::de::Error::custom)
    }
}

/// An unlabelled rooted forest given by its parent map.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlainRootedForest {
    n: usize,
    parent: Vec<Option<usize>>,
}

impl RootedForest for PlainRootedForest {
    fn n(&self) -> usize {
        self.n
    }

    fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v - 1]
    }
}

impl PlainRootedForest {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            parent: vec![None; n],
        }
    }

    /// `parents[v - 1]` is the parent of `v`.
    pub fn from_parents(parents: Vec<Option<usize>>) -> Result<Self> {
        let n = parents.len();
        for (i, p) in parents.iter().enumerate() {
            if let Some(p) = *p {
                if p == 0 || p > n || p == i + 1 {
                    return Err(Error::Validation(format!("bad parent {p} for vertex {}", i + 1)));
                }
            }
        }
        let f = Self { n, parent: parents };
        check_acyclic(&f)?;
        Ok(f)
    }

    pub(crate) fn from_parents_unchecked(parent: Vec<Option<usize>>) -> Self {
        Self {
            n: parent.len(),
            parent,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.parent.iter().flatten().count()
    }

    /// `(child, parent)` pairs in child order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (i + 1, p)))
            .collect()
    }

    /// Every non-root vertex has a larger label than its parent.
    pub fn is_increasing(&self) -> bool {
        self.edges().iter().all(|&(child, parent)| parent < child)
    }

    /// Increasing with roots exactly `{1..k}`, i.e. a member of `R_{n,k}`.
    pub fn is_recursive_forest(&self) -> bool {
        let k = self.tree_count();
        self.is_increasing() && (1..=k).all(|v| self.is_root(v))
    }
}

#[derive(Serialize, Deserialize)]
struct PlainEdge {
    tail: usize,
    head: usize,
}

#[derive(Serialize, Deserialize)]
struct PlainRepr {
    n: usize,
    edges: Vec<PlainEdge>,
}

impl Serialize for PlainRootedForest {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PlainRepr {
            n: self.n,
            edges: self
                .edges()
                .into_iter()
                .map(|(tail, head)| PlainEdge { tail, head })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PlainRootedForest {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PlainRepr::deserialize(d)?;
        let mut parents = vec![None; repr.n];
        for e in repr.edges {
            if e.tail == 0 || e.tail > repr.n {
                return Err(serde::de::Error::custom(format!("tail {} out of range", e.tail)));
            }
            parents[e.tail - 1] = Some(e.head);
        }
        Self::from_parents(parents).map_err(serde::de::Error::custom)
    }
}

pub const MAX_LABELED_ENUMERATION_N: usize = 7;
pub const MAX_INCREASING_ENUMERATION_N: usize = 8;

/// `|F_{n,n-k}| = n!(n-1)! / (k!(k-1)!)`, for `1 <= k <= n`.
pub fn labeled_forest_count(n: u64, k: u64) -> u128 {
    assert!(1 <= k && k <= n);
    let fact = |x: u64| (1..=x as u128).product::<u128>();
    fact(n) * fact(n - 1) / (fact(k) * fact(k - 1))
}

/// `|R_{n,k}| = (n-1)! / (k-1)!`, for `1 <= k <= n`.
pub fn increasing_forest_count(n: u64, k: u64) -> u128 {
    assert!(1 <= k && k <= n);
    (k as u128..n as u128).product()
}

/// Calls `visit` once for every element of `F_{n,m}`.
///
/// Each element corresponds to exactly one sequence of `m` merges of
/// ordered root pairs (the edge labelled `j` is the `j`-th merge), so the
/// enumeration walks that merge tree depth first.
pub fn for_each_labeled_forest<F: FnMut(&RootedLabeledForest)>(n: usize, m: usize, mut visit: F) -> Result<()> {
    if n > MAX_LABELED_ENUMERATION_N {
        return Err(Error::Capacity(format!(
            "labelled forest enumeration is limited to n <= {MAX_LABELED_ENUMERATION_N}, got {n}"
        )));
    }
    if n == 0 || m >= n {
        return Err(domain(format!("need 0 <= m <= n - 1, got n = {n}, m = {m}")));
    }

    fn recurse<F: FnMut(&RootedLabeledForest)>(f: &mut RootedLabeledForest, left: usize, visit: &mut F) {
        if left == 0 {
            visit(f);
            return;
        }
        let roots = f.roots();
        for &tail in &roots {
            for &head in &roots {
                if tail != head {
                    f.merge(tail, head).expect("both are roots");
                    recurse(f, left - 1, visit);
                    f.unmerge(tail);
                }
            }
        }
    }

    let mut f = RootedLabeledForest::empty(n);
    recurse(&mut f, m, &mut visit);
    Ok(())
}

/// All of `F_{n,m}`, each element exactly once.
pub fn enumerate_labeled_forests(n: usize, m: usize) -> Result<Vec<RootedLabeledForest>> {
    let mut out = Vec::new();
    for_each_labeled_forest(n, m, |f| out.push(f.clone()))?;
    Ok(out)
}

/// All of `R_{n,k}`: increasing forests whose roots are exactly `{1..k}`.
/// Vertex `v > k` independently picks any parent in `1..v`, so the set is a
/// mixed-radix product.
pub fn enumerate_increasing_forests(n: usize, k: usize) -> Result<Vec<PlainRootedForest>> {
    if n > MAX_INCREASING_ENUMERATION_N {
        return Err(Error::Capacity(format!(
            "increasing forest enumeration is limited to n <= {MAX_INCREASING_ENUMERATION_N}, got {n}"
        )));
    }
    if k == 0 || k > n {
        return Err(domain(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    let mut choice = vec![1usize; n - k];
    let mut out = Vec::new();
    loop {
        let mut parents = vec![None; n];
        for (i, &c) in choice.iter().enumerate() {
            parents[k + i] = Some(c);
        }
        out.push(PlainRootedForest::from_parents_unchecked(parents));
        // Odometer increment: digit i (vertex k + i + 1) ranges over 1..=k+i.
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(out);
            }
            if choice[i] < k + i {
                choice[i] += 1;
                break;
            }
            choice[i] = 1;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn five_vertex_final() -> RootedLabeledForest {
        let mut f = RootedLabeledForest::empty(5);
        f.merge(3, 1).unwrap();
        f.merge(4, 1).unwrap();
        f.merge(1, 2).unwrap();
        f
    }

    #[test]
    fn merge_contract() {
        let mut f = RootedLabeledForest::empty(2);
        assert_eq!(f.merge(1, 2).unwrap(), 1);
        assert_eq!(f.roots(), vec![2]);
        assert_eq!(
            f.edges(),
            vec![LabeledEdge {
                tail: 1,
                head: 2,
                label: 1
            }]
        );
        assert!(matches!(f.merge(1, 2), Err(Error::InvalidMerge(_))));
        assert!(matches!(f.merge(2, 2), Err(Error::InvalidMerge(_))));
        assert!(f.merge(2, 3).is_err());
    }

    #[test]
    fn full_merge_sequence_leaves_one_root() {
        let n = 9;
        let mut f = RootedLabeledForest::empty(n);
        for v in 1..n {
            assert_eq!(f.merge(v, v + 1).unwrap(), v);
        }
        assert_eq!(f.tree_count(), 1);
        let labels: Vec<_> = f.edges().iter().map(|e| e.label).collect();
        assert_eq!(labels, (1..n).collect::<Vec<_>>());
        f.validate().unwrap();
    }

    #[test]
    fn heights() {
        let f = RootedLabeledForest::empty(4);
        assert_eq!(f.height(), 0);
        assert_eq!(f.height_of(3).unwrap(), 0);
        assert!(f.height_of(5).is_err());

        let path = PlainRootedForest::from_parents(vec![None, Some(1), Some(2)]).unwrap();
        assert_eq!(path.height(), 2);
        assert_eq!(path.height_of(3).unwrap(), 2);

        let star = PlainRootedForest::from_parents(vec![None, Some(1), Some(1), Some(1), Some(1)]).unwrap();
        assert_eq!(star.height(), 1);
    }

    #[test]
    fn tree_sizes() {
        assert_eq!(RootedLabeledForest::empty(4).tree_sizes(), vec![1, 1, 1, 1]);
        let mut single = RootedLabeledForest::empty(3);
        single.merge(1, 2).unwrap();
        single.merge(2, 3).unwrap();
        assert_eq!(single.tree_sizes(), vec![3]);
        let mut sizes = five_vertex_final().tree_sizes();
        sizes.sort();
        assert_eq!(sizes, vec![1, 4]);
    }

    #[test]
    fn validation_rejects_bad_forests() {
        let e = |tail, head, label| LabeledEdge { tail, head, label };
        // Increasing labels downward.
        assert!(RootedLabeledForest::from_edges(3, &[e(1, 2, 2), e(2, 3, 1)]).is_err());
        // Duplicate label.
        assert!(RootedLabeledForest::from_edges(3, &[e(1, 3, 1), e(2, 3, 1)]).is_err());
        // Cycle.
        assert!(RootedLabeledForest::from_edges(2, &[e(1, 2, 1), e(2, 1, 2)]).is_err());
        assert!(RootedLabeledForest::from_edges(3, &[e(1, 2, 1), e(2, 3, 2)]).is_ok());
        assert!(PlainRootedForest::from_parents(vec![Some(2), Some(1)]).is_err());
    }

    #[test]
    fn forest_json_is_sorted_by_label() {
        let f = five_vertex_final();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(
            json,
            r#"{"n":5,"edges":[{"tail":3,"head":1,"label":1},{"tail":4,"head":1,"label":2},{"tail":1,"head":2,"label":3}]}"#
        );
        let back: RootedLabeledForest = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn small_enumeration_counts() {
        assert_eq!(enumerate_labeled_forests(2, 1).unwrap().len(), 2);
        assert_eq!(enumerate_labeled_forests(3, 2).unwrap().len(), 12);
        assert_eq!(enumerate_labeled_forests(5, 3).unwrap().len(), 1440);
        assert_eq!(enumerate_increasing_forests(3, 1).unwrap().len(), 2);
        assert_eq!(enumerate_increasing_forests(4, 2).unwrap().len(), 6);
        assert_eq!(enumerate_increasing_forests(5, 5).unwrap().len(), 1);
        assert!(matches!(enumerate_labeled_forests(8, 2), Err(Error::Capacity(_))));
        assert!(matches!(enumerate_increasing_forests(9, 2), Err(Error::Capacity(_))));
        assert!(enumerate_labeled_forests(4, 4).is_err());
        assert!(enumerate_increasing_forests(4, 0).is_err());
    }

    #[test]
    fn enumerations_are_valid_and_distinct() {
        for n in 1..=5 {
            for k in 1..=n {
                let labeled = enumerate_labeled_forests(n, n - k).unwrap();
                let distinct: HashSet<_> = labeled.iter().map(|f| f.labeled_key()).collect();
                assert_eq!(distinct.len(), labeled.len());
                assert!(labeled.iter().all(|f| f.validate().is_ok() && f.tree_count() == k));

                let inc = enumerate_increasing_forests(n, k).unwrap();
                let distinct: HashSet<_> = inc.iter().map(|f| f.shape_key()).collect();
                assert_eq!(distinct.len(), inc.len());
                assert!(inc.iter().all(|f| f.is_recursive_forest() && f.tree_count() == k));
            }
        }
    }

    #[test]
    fn closed_form_counts() {
        assert_eq!(labeled_forest_count(2, 1), 2);
        assert_eq!(labeled_forest_count(5, 2), 1440);
        assert_eq!(increasing_forest_count(4, 2), 6);
        assert_eq!(increasing_forest_count(7, 7), 1);
    }
}
