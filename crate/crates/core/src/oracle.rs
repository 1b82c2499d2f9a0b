//! Exact small-`n` ground truth for tree counts.
//!
//! Future merges depend only on the set `S` of surviving roots, never on the
//! shape of the trees hanging below them. So the law of the final tree count
//! started from `S` satisfies
//!
//! `D(S) = sum_w deg_S(w) / (2 |E(S)|) * D(S - w)`,
//!
//! with a point mass at `|S|` when `S` spans no edge. All arithmetic is in
//! exact rationals.

use std::collections::HashMap;
use std::rc::Rc;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{check_probability, Error, Result};
use crate::graph::{choose2, Graph};

/// Largest graph accepted by [`exact_c_distribution`].
pub const MAX_GRAPH_N: usize = 14;
/// Largest `n` accepted by [`exact_cnp_distribution`].
pub const MAX_GNP_N: usize = 6;

/// An exact law on tree counts. Only counts with positive probability are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDistribution {
    support: Vec<usize>,
    prob: Vec<BigRational>,
}

impl ExactDistribution {
    fn from_dense(dense: &[BigRational]) -> Self {
        let (support, prob) = dense
            .iter()
            .enumerate()
            .filter(|(_, q)| !q.is_zero())
            .map(|(c, q)| (c, q.clone()))
            .unzip();
        let d = Self { support, prob };
        debug_assert!(d.total().is_one());
        d
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn probabilities(&self) -> &[BigRational] {
        &self.prob
    }

    pub fn probabilities_f64(&self) -> Vec<f64> {
        self.prob.iter().map(to_f64).collect()
    }

    /// `P(C = count)`.
    pub fn prob_of(&self, count: usize) -> BigRational {
        match self.support.binary_search(&count) {
            Ok(i) => self.prob[i].clone(),
            Err(_) => BigRational::zero(),
        }
    }

    pub fn total(&self) -> BigRational {
        self.prob.iter().fold(BigRational::zero(), |acc, q| acc + q)
    }

    pub fn mean(&self) -> BigRational {
        self.support
            .iter()
            .zip(&self.prob)
            .fold(BigRational::zero(), |acc, (&c, q)| acc + q * BigRational::from_integer(BigInt::from(c)))
    }

    pub fn mean_f64(&self) -> f64 {
        to_f64(&self.mean())
    }

    /// `(count, probability)` pairs as floats, for goodness-of-fit tests.
    pub fn to_f64_map(&self) -> std::collections::BTreeMap<usize, f64> {
        self.support.iter().copied().zip(self.probabilities_f64()).collect()
    }
}

impl Serialize for ExactDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ExactDistribution", 2)?;
        st.serialize_field("support", &self.support)?;
        st.serialize_field("prob", &self.probabilities_f64())?;
        st.end()
    }
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().expect("probabilities are finite")
}

type Dense = Rc<Vec<BigRational>>;

/// Memoised DP over `(root set, edges induced on it)`.
///
/// Keying on the induced edges as well as the root set lets a single table
/// serve every graph on the same vertex count.
struct Solver {
    n: usize,
    pair_bits: Vec<Vec<(usize, usize, u32)>>,
    memo: HashMap<(u16, u128), Dense>,
}

impl Solver {
    fn new(n: usize) -> Self {
        debug_assert!(n <= MAX_GRAPH_N);
        // pair_bits[w] lists (u, v, bit) for every pair containing w.
        let mut pair_bits = vec![Vec::new(); n];
        let mut bit = 0;
        for u in 0..n {
            for v in u + 1..n {
                pair_bits[u].push((u, v, bit));
                pair_bits[v].push((u, v, bit));
                bit += 1;
            }
        }
        Self {
            n,
            pair_bits,
            memo: HashMap::new(),
        }
    }

    fn induced(&self, set: u16, mask: u128) -> u128 {
        let mut out = 0u128;
        for w in 0..self.n {
            if set >> w & 1 == 1 {
                for &(u, v, b) in &self.pair_bits[w] {
                    if set >> u & 1 == 1 && set >> v & 1 == 1 {
                        out |= mask & (1u128 << b);
                    }
                }
            }
        }
        out
    }

    /// Law of the final count from root set `set`, where `edges` is already
    /// restricted to pairs inside `set`.
    fn solve(&mut self, set: u16, edges: u128) -> Dense {
        if let Some(d) = self.memo.get(&(set, edges)) {
            return d.clone();
        }
        let mut dense = vec![BigRational::zero(); self.n + 1];
        let edge_total = edges.count_ones();
        if edge_total == 0 {
            dense[set.count_ones() as usize] = BigRational::one();
        } else {
            for w in 0..self.n {
                if set >> w & 1 == 0 {
                    continue;
                }
                let mut degree = 0u32;
                let mut without_w = edges;
                for &(_, _, b) in &self.pair_bits[w] {
                    if edges >> b & 1 == 1 {
                        degree += 1;
                        without_w &= !(1u128 << b);
                    }
                }
                if degree == 0 {
                    continue;
                }
                let weight = BigRational::new(BigInt::from(degree), BigInt::from(2 * edge_total));
                let sub = self.solve(set & !(1 << w), without_w);
                for (acc, q) in dense.iter_mut().zip(sub.iter()) {
                    if !q.is_zero() {
                        *acc += &weight * q;
                    }
                }
            }
        }
        let d = Rc::new(dense);
        self.memo.insert((set, edges), d.clone());
        d
    }

    fn solve_graph(&mut self, mask: u128) -> Dense {
        let full = (1u16 << self.n) - 1;
        self.solve(full, self.induced(full, mask))
    }
}

fn graph_mask(g: &Graph) -> u128 {
    (0..g.pair_count()).filter(|&i| g.has_index(i)).fold(0u128, |m, i| m | 1u128 << i)
}

/// Exact law of the Kingman forest's tree count on `g`.
pub fn exact_c_distribution(g: &Graph) -> Result<ExactDistribution> {
    let n = g.n();
    if n > MAX_GRAPH_N {
        return Err(Error::Capacity(format!(
            "exact tree-count law is limited to n <= {MAX_GRAPH_N}, got n = {n}"
        )));
    }
    let mut solver = Solver::new(n);
    Ok(ExactDistribution::from_dense(&solver.solve_graph(graph_mask(g))))
}

/// `strata[m][c]`: sum of `P(C = c | g)` over all graphs `g` with `m` edges.
fn strata(n: usize) -> Arc<Vec<Vec<BigRational>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<Vec<BigRational>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().expect("cache lock").get(&n) {
        return s.clone();
    }
    let pairs = choose2(n as u64) as u32;
    let mut solver = Solver::new(n);
    let mut sums = vec![vec![BigRational::zero(); n + 1]; pairs as usize + 1];
    for mask in 0u128..1u128 << pairs {
        let d = solver.solve_graph(mask);
        let row = &mut sums[mask.count_ones() as usize];
        for (acc, q) in row.iter_mut().zip(d.iter()) {
            if !q.is_zero() {
                *acc += q;
            }
        }
    }
    let s = Arc::new(sums);
    cache.lock().expect("cache lock").insert(n, s.clone());
    s
}

/// Exact law of `C_{n,p}`, summing over every graph on `n` vertices.
///
/// `p` is taken as the exact rational value of its binary representation.
pub fn exact_cnp_distribution(n: usize, p: f64) -> Result<ExactDistribution> {
    check_probability("p", p)?;
    if n == 0 {
        return Err(crate::error::domain("n must be at least 1"));
    }
    if n > MAX_GNP_N {
        return Err(Error::Capacity(format!(
            "exact C(n, p) law is limited to n <= {MAX_GNP_N}, got n = {n}"
        )));
    }
    let q = BigRational::from_float(p).expect("finite probability");
    let not_q = BigRational::one() - &q;
    let pairs = choose2(n as u64) as i32;
    let strata = strata(n);
    let mut dense = vec![BigRational::zero(); n + 1];
    for (m, row) in strata.iter().enumerate() {
        let weight = q.pow(m as i32) * not_q.pow(pairs - m as i32);
        if weight.is_zero() {
            continue;
        }
        for (acc, s) in dense.iter_mut().zip(row) {
            *acc += &weight * s;
        }
    }
    Ok(ExactDistribution::from_dense(&dense))
}

/// `E[C_{n,p}]`, exactly, then rounded.
pub fn exact_mean_c(n: usize, p: f64) -> Result<f64> {
    Ok(exact_cnp_distribution(n, p)?.mean_f64())
}
