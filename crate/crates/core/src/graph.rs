//! Simple undirected graphs on `{1..n}` and the `G(n, p)` generator.
//!
//! Unordered pairs `{u, v}` with `u < v` are linearised row-major, so pair
//! index order coincides with lexicographic order. Edge membership is a
//! packed bitset over that index.

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_probability, Error, Result};
use crate::rngdist::sample_geometric;

/// Number of unordered pairs of an `n`-set.
pub fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Row-major index of the pair `{u, v}` (1-based, `u < v`) among all pairs of `{1..n}`.
pub fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(1 <= u && u < v && v <= n);
    (u - 1) * (2 * n - u) / 2 + (v - u - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_at(n: usize, mut index: usize) -> (usize, usize) {
    let mut u = 1;
    while index >= n - u {
        index -= n - u;
        u += 1;
    }
    (u, u + 1 + index)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    bits: Vec<u64>,
    edge_count: usize,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let pairs = choose2(n as u64) as usize;
        Self {
            n,
            bits: vec![0; pairs.div_ceil(64)],
            edge_count: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..g.pair_count() {
            g.set_index(i);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            g.insert(u, v)?;
        }
        Ok(g)
    }

    /// The graph whose edges are the set bits of `mask` in pair-index order.
    /// Only meaningful for `C(n,2) <= 128`.
    pub fn from_mask(n: usize, mask: u128) -> Self {
        let mut g = Self::empty(n);
        for i in 0..g.pair_count().min(128) {
            if mask >> i & 1 == 1 {
                g.set_index(i);
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pair_count(&self) -> usize {
        choose2(self.n as u64) as usize
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.n {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    fn ordered(&self, u: usize, v: usize) -> Result<(usize, usize)> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        match u.cmp(&v) {
            std::cmp::Ordering::Less => Ok((u, v)),
            std::cmp::Ordering::Greater => Ok((v, u)),
            std::cmp::Ordering::Equal => Err(Error::InvalidEdge(u, v)),
        }
    }

    fn set_index(&mut self, i: usize) -> bool {
        let (word, bit) = (i / 64, i % 64);
        let fresh = self.bits[word] >> bit & 1 == 0;
        if fresh {
            self.bits[word] |= 1 << bit;
            self.edge_count += 1;
        }
        fresh
    }

    pub(crate) fn has_index(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// Adds `{u, v}` in place; returns whether the edge was new.
    pub fn insert(&mut self, u: usize, v: usize) -> Result<bool> {
        let (a, b) = self.ordered(u, v)?;
        Ok(self.set_index(pair_index(self.n, a, b)))
    }

    /// `G + e`. Adding an existing edge returns an equal graph.
    pub fn add_edge(&self, u: usize, v: usize) -> Result<Self> {
        let mut g = self.clone();
        g.insert(u, v)?;
        Ok(g)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> Result<bool> {
        let (a, b) = self.ordered(u, v)?;
        Ok(self.has_index(pair_index(self.n, a, b)))
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok((1..=self.n)
            .filter(|&w| w != v && self.has_edge(v, w).unwrap_or(false))
            .count())
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (1..n).flat_map(move |u| (u + 1..=n).map(move |v| (u, v))).enumerate().filter_map(
            move |(i, e)| if self.has_index(i) { Some(e) } else { None },
        )
    }

    /// Whether no edge joins two members of `vertices`.
    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(i, &u)| {
            vertices[i + 1..]
                .iter()
                .all(|&v| u == v || !self.has_edge(u, v).unwrap_or(false))
        })
    }

    /// The graph obtained by renaming vertex `v` to `perm[v - 1]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::Validation("permutation length differs from n".into()));
        }
        let mut g = Self::empty(self.n);
        for (u, v) in self.edges() {
            g.insert(perm[u - 1], perm[v - 1])?;
        }
        Ok(g)
    }
}

/// Erdős–Rényi `G(n, p)`: every pair is an edge independently with
/// probability `p`. Gaps between successive edges in pair-index order are
/// geometric, so the cost is proportional to the number of edges.
pub fn sample_gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    check_probability("p", p)?;
    if n == 0 {
        return Err(crate::error::domain("G(n, p) needs n >= 1"));
    }
    let mut g = Graph::empty(n);
    if p == 0.0 {
        return Ok(g);
    }
    let pairs = g.pair_count() as u64;
    let mut i = 0u64;
    loop {
        let gap = sample_geometric(p, rng)?;
        i = match i.checked_add(gap) {
            Some(next) if next < pairs => next,
            _ => break,
        };
        g.set_index(i as usize);
        i += 1;
    }
    Ok(g)
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr {
            n: self.n,
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(d)?;
        let edges: Vec<_> = repr.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_edges(repr.n, &edges).map_err(serde::de::Error::custom)
    }
}
