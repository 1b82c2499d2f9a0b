//! The edge-reveal process: a Markov chain that builds a `G(n, p)` sample and
//! its Kingman forest together by querying uniformly random vertex pairs and
//! revealing their Bernoulli bits lazily.
//!
//! Alongside the faithful simulation ([`ErpState`], [`run_erp`]) this module
//! has the fast sampler [`fast_walk`] for the edge-count walk `M_k`, the
//! number of verified non-edges among roots at the `k`-th coalescing time.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::forest::{RootedForest, RootedLabeledForest};
use crate::graph::{choose2, pair_at, pair_index, Graph};
use crate::rngdist::{sample_hypergeometric, sample_truncated_geometric};
use crate::urrf::{phi_fiber_sample, sample_urrf};

const QUERIED: u8 = 1;
const KNOWN: u8 = 2;
const ONE: u8 = 4;

/// What a single query did to the state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    /// Fewer than two vertices: there is nothing to query.
    NoPairs,
    /// The pair was not inside the root set and the revealed graph is not
    /// tracked, so its bit was never looked at.
    Skipped,
    /// Bit 0. `fresh` is true when this verified a new complement edge.
    NonEdge { within_roots: bool, fresh: bool },
    /// Bit 1 with an endpoint that is not a root: only the revealed graph changes.
    RevealedEdge,
    /// Bit 1 between two roots: `tail` hangs below `head`. `removed` is the
    /// complement degree of `tail` just before the merge.
    Merge { tail: usize, head: usize, removed: u64 },
}

/// Full state `(R_k, F_k, G_k, G_k^*)` of the edge-reveal process plus the
/// memoised bits.
#[derive(Clone, Debug)]
pub struct ErpState {
    n: usize,
    p: f64,
    is_root: Vec<bool>,
    root_count: usize,
    forest: RootedLabeledForest,
    revealed: Option<Graph>,
    pair_state: Vec<u8>,
    complement_degree: Vec<u64>,
    complement_edges: u64,
    step: u64,
    m_trace: Vec<u64>,
    trace_start: usize,
}

impl ErpState {
    /// The initial state: all vertices roots, nothing queried. With
    /// `track_revealed` every queried bit is materialised and the revealed
    /// graph `G_k` is maintained; otherwise pairs outside the root set are
    /// skipped, which leaves the forest and complement process unchanged.
    pub fn new(n: usize, p: f64, track_revealed: bool) -> Result<Self> {
        if n == 0 {
            return Err(domain("edge reveal process needs n >= 1"));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(domain(format!("p = {p} is not in [0, 1]")));
        }
        Ok(Self {
            n,
            p,
            is_root: vec![true; n + 1],
            root_count: n,
            forest: RootedLabeledForest::empty(n),
            revealed: track_revealed.then(|| Graph::empty(n)),
            pair_state: vec![0; choose2(n as u64) as usize],
            complement_degree: vec![0; n + 1],
            complement_edges: 0,
            step: 0,
            m_trace: vec![0],
            trace_start: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn roots(&self) -> Vec<usize> {
        (1..=self.n).filter(|&v| self.is_root[v]).collect()
    }

    pub fn root_count(&self) -> usize {
        self.root_count
    }

    pub fn forest(&self) -> &RootedLabeledForest {
        &self.forest
    }

    /// `G_k`, when tracked.
    pub fn revealed(&self) -> Option<&Graph> {
        self.revealed.as_ref()
    }

    /// `N_k = |E(G_k^*)|`.
    pub fn complement_edge_count(&self) -> u64 {
        self.complement_edges
    }

    /// Edges of the complement graph `G_k^*`, lexicographically.
    pub fn complement_edges(&self) -> Vec<(usize, usize)> {
        let roots = self.roots();
        let mut out = Vec::new();
        for (i, &u) in roots.iter().enumerate() {
            for &v in &roots[i + 1..] {
                if self.is_verified_non_edge(pair_index(self.n, u, v)) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Memoised bit of `{u, v}`, if it has been drawn.
    pub fn bit(&self, u: usize, v: usize) -> Option<bool> {
        let (a, b) = (u.min(v), u.max(v));
        let s = self.pair_state[pair_index(self.n, a, b)];
        (s & KNOWN != 0).then_some(s & ONE != 0)
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn coalescences(&self) -> usize {
        self.forest.edge_count()
    }

    /// `N` recorded at each coalescing time, starting at coalescence index
    /// [`trace_start`](Self::trace_start).
    pub fn m_trace(&self) -> &[u64] {
        &self.m_trace
    }

    pub fn trace_start(&self) -> usize {
        self.trace_start
    }

    /// All pairs of current roots are verified non-edges; nothing can change any more.
    pub fn is_terminated(&self) -> bool {
        self.complement_edges >= choose2(self.root_count as u64)
    }

    fn is_verified_non_edge(&self, idx: usize) -> bool {
        self.pair_state[idx] & (QUERIED | ONE) == QUERIED
    }

    fn bit_at<R: Rng + ?Sized>(&mut self, idx: usize, rng: &mut R) -> bool {
        let s = self.pair_state[idx];
        if s & KNOWN != 0 {
            return s & ONE != 0;
        }
        let bit = rng.random_bool(self.p);
        self.pair_state[idx] = s | KNOWN | if bit { ONE } else { 0 };
        bit
    }

    /// One query of a uniformly random pair, applying exactly one update rule.
    pub fn erp_step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> StepOutcome {
        let n = self.n;
        if n < 2 {
            self.step += 1;
            return StepOutcome::NoPairs;
        }
        let u = rng.random_range(1..=n);
        let mut v = rng.random_range(1..n);
        if v >= u {
            v += 1;
        }
        let (a, b) = (u.min(v), u.max(v));
        let idx = pair_index(n, a, b);
        self.step += 1;
        let was_queried = self.pair_state[idx] & QUERIED != 0;
        let within_roots = self.is_root[a] && self.is_root[b];

        if !within_roots {
            if self.revealed.is_none() {
                self.pair_state[idx] |= QUERIED;
                return StepOutcome::Skipped;
            }
            let bit = self.bit_at(idx, rng);
            self.pair_state[idx] |= QUERIED;
            if bit {
                self.revealed.as_mut().expect("tracked").insert(a, b).expect("valid pair");
                return StepOutcome::RevealedEdge;
            }
            return StepOutcome::NonEdge {
                within_roots: false,
                fresh: false,
            };
        }

        let bit = self.bit_at(idx, rng);
        self.pair_state[idx] |= QUERIED;
        if !bit {
            if !was_queried {
                self.complement_edges += 1;
                self.complement_degree[a] += 1;
                self.complement_degree[b] += 1;
            }
            return StepOutcome::NonEdge {
                within_roots: true,
                fresh: !was_queried,
            };
        }

        // A 1-bit between two roots merges on its first query, so it cannot
        // have been seen before.
        debug_assert!(!was_queried);
        let (tail, head) = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
        let removed = self.complement_degree[tail];
        if removed > 0 {
            for w in 1..=n {
                if w != tail && self.is_root[w] {
                    let j = pair_index(n, tail.min(w), tail.max(w));
                    if self.is_verified_non_edge(j) {
                        self.complement_degree[w] -= 1;
                    }
                }
            }
        }
        self.complement_edges -= removed;
        self.complement_degree[tail] = 0;
        self.is_root[tail] = false;
        self.root_count -= 1;
        self.forest.merge(tail, head).expect("both endpoints are roots");
        if let Some(g) = self.revealed.as_mut() {
            g.insert(a, b).expect("valid pair");
        }
        self.m_trace.push(self.complement_edges);
        StepOutcome::Merge { tail, head, removed }
    }

    /// Runs queries up to the next coalescing time or termination, whichever
    /// comes first.
    pub fn run_epoch<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Epoch {
        let mut fresh_non_edges = 0;
        let mut steps = 0;
        while !self.is_terminated() {
            steps += 1;
            match self.erp_step(rng) {
                StepOutcome::NonEdge {
                    within_roots: true,
                    fresh: true,
                } => fresh_non_edges += 1,
                StepOutcome::Merge { removed, .. } => {
                    return Epoch {
                        fresh_non_edges,
                        removed: Some(removed),
                        steps,
                    }
                }
                _ => {}
            }
        }
        Epoch {
            fresh_non_edges,
            removed: None,
            steps,
        }
    }

    /// The full underlying graph `{e : B_e = 1}`, drawing every bit that has
    /// not been drawn yet. Its law is `G(n, p)` and the forest built so far is
    /// a Kingman forest prefix of it.
    pub fn underlying_graph<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Graph {
        let mut g = Graph::empty(self.n);
        for idx in 0..self.pair_state.len() {
            if self.bit_at(idx, rng) {
                let (u, v) = pair_at(self.n, idx);
                g.insert(u, v).expect("valid pair");
            }
        }
        g
    }

    /// The edge-count walk implied by the state so far, once terminated.
    pub fn walk_trace(&self) -> WalkTrace {
        let mut m = self.m_trace.clone();
        let merges = self.coalescences();
        // Termination strictly after the last coalescing time contributes
        // M_{merges+1} = N_{K*}.
        if self.is_terminated() && m.last().copied() < Some(choose2(self.root_count as u64)) {
            m.push(self.complement_edges);
        }
        WalkTrace::from_walk(self.n, self.p, self.trace_start, m, merges)
    }

    /// Structural invariants of the state; used by tests.
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |msg: String| Err(crate::error::Error::Validation(msg));
        if self.root_count != self.n - self.forest.edge_count() {
            return bad("root count differs from n - |E(F)|".into());
        }
        if self.roots() != self.forest.roots() {
            return bad("root set differs from forest roots".into());
        }
        let comp = self.complement_edges();
        if comp.len() as u64 != self.complement_edges {
            return bad(format!("N = {} but {} complement edges", self.complement_edges, comp.len()));
        }
        for &(u, v) in &comp {
            if self.bit(u, v) != Some(false) {
                return bad(format!("complement edge {{{u}, {v}}} is not a 0-bit"));
            }
        }
        if let Some(g) = &self.revealed {
            for (u, v) in g.edges() {
                if self.bit(u, v) != Some(true) {
                    return bad(format!("revealed edge {{{u}, {v}}} is not a 1-bit"));
                }
            }
        }
        for (j, &m) in self.m_trace.iter().enumerate() {
            let roots = self.n - (self.trace_start + j);
            if m > choose2(roots as u64) {
                return bad(format!("M_{} = {m} exceeds C({roots}, 2)", self.trace_start + j));
            }
        }
        Ok(())
    }
}

/// One coalescing epoch of the process.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Epoch {
    /// New verified non-edges among roots (the walk's `X` increment).
    pub fresh_non_edges: u64,
    /// Complement degree of the merged tail (the walk's `Y` decrement), or
    /// `None` when the process terminated without another merge.
    pub removed: Option<u64>,
    pub steps: u64,
}

/// Runs the faithful process to termination. `p = 0` is accepted: the run
/// ends once every pair has been queried, with `n` trees.
pub fn run_erp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<(ErpState, WalkTrace)> {
    run_erp_with(n, p, false, rng)
}

pub fn run_erp_with<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    track_revealed: bool,
    rng: &mut R,
) -> Result<(ErpState, WalkTrace)> {
    let mut state = ErpState::new(n, p, track_revealed)?;
    while !state.is_terminated() {
        state.erp_step(rng);
    }
    let trace = state.walk_trace();
    Ok((state, trace))
}

/// The edge-count walk `M_0, M_1, ...` of one run.
///
/// `m` holds the walk up to and including its first crossing index `J*`
/// (the first `j` with `M_j >= C(n - j, 2)`); afterwards it is frozen.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkTrace {
    pub n: usize,
    pub p: f64,
    start: usize,
    m: Vec<u64>,
    j_star: Option<usize>,
    merges: usize,
    tree_count: usize,
}

impl WalkTrace {
    fn from_walk(n: usize, p: f64, start: usize, mut m: Vec<u64>, merges: usize) -> Self {
        let j_star = m
            .iter()
            .enumerate()
            .position(|(j, &mj)| mj >= choose2((n - (start + j)) as u64))
            .map(|j| start + j);
        if let Some(j) = j_star {
            m.truncate(j - start + 1);
        }
        Self {
            n,
            p,
            start,
            m,
            j_star,
            merges,
            tree_count: n - merges,
        }
    }

    /// Recorded walk values, starting at index [`start`](Self::start).
    pub fn m(&self) -> &[u64] {
        &self.m
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// `M_j`, frozen at its last recorded value after `J*`.
    pub fn m_at(&self, j: usize) -> Option<u64> {
        if j < self.start {
            return None;
        }
        self.m.get(j - self.start).or(self.m.last()).copied()
    }

    pub fn j_star(&self) -> Option<usize> {
        self.j_star
    }

    /// Number of coalescing times that actually occurred.
    pub fn merges(&self) -> usize {
        self.merges
    }

    /// Trees of the Kingman forest, `n - merges`.
    ///
    /// This equals `n - J* + 1` when the walk froze by exhausting the
    /// remaining pairs between two coalescing times, and `n - J*` when the
    /// crossing happened at a coalescing time itself (for instance when a
    /// single root is left).
    pub fn tree_count(&self) -> usize {
        self.tree_count
    }

    /// Whether the crossing happened at a coalescing time.
    pub fn crossed_at_merge(&self) -> bool {
        self.j_star == Some(self.merges)
    }

    pub fn to_record(&self, include_m: bool) -> WalkRecord {
        WalkRecord {
            n: self.n,
            p: self.p,
            j_star: self.j_star,
            tree_count: self.tree_count,
            m: include_m.then(|| self.m.clone()),
        }
    }
}

/// JSONL record for one walk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkRecord {
    pub n: usize,
    pub p: f64,
    pub j_star: Option<usize>,
    pub tree_count: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<Vec<u64>>,
}

/// Samples the edge-count walk directly from its one-step law:
/// `M_{k+1} = M_k + X_k - Y_k` with `X_k = min(Geo(p), C(n-k,2) - M_k)` and,
/// when `X_k` is not capped, `Y_k ~ HG(n-k-2, M_k + X_k, C(n-k,2) - 1)`.
/// A capped `X_k` means no further coalescence and freezes the walk.
pub fn fast_walk<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<WalkTrace> {
    if n == 0 {
        return Err(domain("walk needs n >= 1"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(domain(format!("walk needs 0 < p <= 1, got {p}")));
    }
    let mut m = Vec::with_capacity(n);
    m.push(0u64);
    let mut merges = 0usize;
    loop {
        let roots = (n - merges) as u64;
        let pairs = choose2(roots);
        let current = *m.last().expect("non-empty");
        if current >= pairs {
            break;
        }
        let cap = pairs - current;
        let x = sample_truncated_geometric(p, cap, rng)?;
        if x == cap {
            m.push(pairs);
            break;
        }
        let before_merge = current + x;
        let y = sample_hypergeometric(roots - 2, before_merge, pairs - 1, rng)?;
        m.push(before_merge - y);
        merges += 1;
    }
    Ok(WalkTrace::from_walk(n, p, 0, m, merges))
}

/// A state at a coalescing time with `surviving_roots` roots and `m_edges`
/// verified non-edges among them, drawn from the exact conditional law: the
/// forest uniform on `F_{n, n - surviving_roots}` and the complement graph
/// uniform among graphs on the roots with `m_edges` edges. Pairs among the
/// roots that are not complement edges are unqueried. The revealed graph is
/// not tracked and the step counter starts at 0.
pub fn conditioned_state<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    surviving_roots: usize,
    m_edges: u64,
    rng: &mut R,
) -> Result<ErpState> {
    if surviving_roots == 0 || surviving_roots > n {
        return Err(domain(format!("need 1 <= roots <= n, got roots = {surviving_roots}, n = {n}")));
    }
    let root_pairs = choose2(surviving_roots as u64);
    if m_edges > root_pairs {
        return Err(domain(format!(
            "{m_edges} complement edges do not fit on {surviving_roots} roots"
        )));
    }
    let mut state = ErpState::new(n, p, false)?;
    let target = sample_urrf(n, surviving_roots, rng)?.forest;
    let forest = phi_fiber_sample(&target, rng)?;
    let roots = forest.roots();
    for v in 1..=n {
        state.is_root[v] = false;
    }
    for &r in &roots {
        state.is_root[r] = true;
    }
    state.root_count = surviving_roots;
    state.forest = forest;
    for i in index::sample(rng, root_pairs as usize, m_edges as usize) {
        let (a, b) = pair_at(surviving_roots, i);
        let (u, v) = (roots[a - 1], roots[b - 1]);
        state.pair_state[pair_index(n, u, v)] = QUERIED | KNOWN;
        state.complement_degree[u] += 1;
        state.complement_degree[v] += 1;
    }
    state.complement_edges = m_edges;
    state.trace_start = n - surviving_roots;
    state.m_trace = vec![m_edges];
    Ok(state)
}
