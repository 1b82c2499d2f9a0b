//! Seedable random streams and the discrete/continuous laws the processes
//! consume.
//!
//! Every sampler is generic over [`rand::Rng`] so that it can be driven by an
//! [`RngStream`] (the reproducible default) or by any other generator in
//! tests. Parameter checks happen on every call; a value outside the domain
//! is reported as [`Error::ParameterDomain`].

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Hypergeometric};
use statrs::function::factorial::ln_binomial;

use crate::error::{check_probability, domain, Result};

/// Populations at or below this size are sampled by an exact inverse-cdf
/// walk; larger ones go to a rejection sampler unless the mean is small.
pub const HYPERGEOMETRIC_WALK_THRESHOLD: u64 = 500;
/// Reduced means below this are also walked, whatever the population.
pub const HYPERGEOMETRIC_WALK_MEAN: f64 = 20.0;

/// A reproducible random stream keyed by `(seed, stream_id)`.
///
/// Backed by ChaCha8 with the stream id written into the cipher's 64-bit
/// stream word, so distinct ids give disjoint keystreams for the same seed
/// and the sequence is identical on every platform.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Uniform draw on `(0, 1]`.
pub(crate) fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

pub fn sample_bernoulli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<bool> {
    check_probability("p", p)?;
    Ok(rng.random_bool(p))
}

/// Number of failures before the first success in Bernoulli(`p`) trials.
pub fn sample_geometric<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<u64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(domain(format!("geometric needs 0 < p <= 1, got {p}")));
    }
    if p == 1.0 {
        return Ok(0);
    }
    let geo = Geometric::new(p).map_err(|e| domain(e.to_string()))?;
    Ok(geo.sample(rng))
}

/// `min(G, cap)` for `G ~ Geo(p)`: all mass at or beyond `cap` lands on `cap`.
pub fn sample_truncated_geometric<R: Rng + ?Sized>(p: f64, cap: u64, rng: &mut R) -> Result<u64> {
    let g = sample_geometric(p, rng)?;
    Ok(g.min(cap))
}

fn check_hypergeometric(draws: u64, successes: u64, population: u64) -> Result<()> {
    if successes > population || draws > population {
        return Err(domain(format!(
            "hypergeometric needs successes, draws <= population; got HG({draws}, {successes}, {population})"
        )));
    }
    Ok(())
}

/// Support `[lo, hi]` of `HG(draws, successes, population)`.
fn hypergeometric_support(draws: u64, successes: u64, population: u64) -> (u64, u64) {
    let failures = population - successes;
    (draws.saturating_sub(failures), draws.min(successes))
}

/// Number of successes in `draws` samples without replacement from a
/// population of `population` items, `successes` of which are marked.
///
/// By symmetry the problem is first reduced so that both the marked items and
/// the draws are at most half the population; the reduced count then has
/// support starting at 0. Small populations and small reduced means use an
/// exact inverse-cdf walk from 0, everything else the H2PE rejection sampler.
pub fn sample_hypergeometric<R: Rng + ?Sized>(
    draws: u64,
    successes: u64,
    population: u64,
    rng: &mut R,
) -> Result<u64> {
    check_hypergeometric(draws, successes, population)?;
    let (lo, hi) = hypergeometric_support(draws, successes, population);
    if lo == hi {
        return Ok(lo);
    }
    // Marked items in the sample = draws - unmarked items in the sample.
    if successes > population / 2 {
        return Ok(draws - sample_hypergeometric(draws, population - successes, population, rng)?);
    }
    // Marked items in the sample = successes - marked items left behind.
    if draws > population / 2 {
        return Ok(successes - sample_hypergeometric(population - draws, successes, population, rng)?);
    }
    let mean = draws as f64 * successes as f64 / population as f64;
    if population > HYPERGEOMETRIC_WALK_THRESHOLD && mean >= HYPERGEOMETRIC_WALK_MEAN {
        let hg = Hypergeometric::new(population, successes, draws).map_err(|e| domain(e.to_string()))?;
        return Ok(hg.sample(rng));
    }

    // Inverse-cdf walk from 0 using the pmf ratio
    // P(j+1)/P(j) = (K-j)(n-j) / ((j+1)(N-K-n+j+1)).
    let failures = population - successes;
    let mut u = rng.random::<f64>();
    let mut j = 0;
    let mut mass = hypergeometric_pmf(0, draws, successes, population);
    while j < hi && u >= mass {
        u -= mass;
        let num = (successes - j) as f64 * (draws - j) as f64;
        let den = (j + 1) as f64 * (failures + j + 1 - draws) as f64;
        mass *= num / den;
        j += 1;
    }
    Ok(j)
}

/// Sum of `r` independent `Geo(p)` draws.
pub fn sample_negative_binomial<R: Rng + ?Sized>(r: u64, p: f64, rng: &mut R) -> Result<u64> {
    if r == 0 {
        return Err(domain("negative binomial needs r >= 1"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(domain(format!("negative binomial needs 0 < p <= 1, got {p}")));
    }
    if p == 1.0 {
        return Ok(0);
    }
    let geo = Geometric::new(p).map_err(|e| domain(e.to_string()))?;
    Ok((0..r).map(|_| geo.sample(rng)).sum())
}

/// A point uniform on the `k`-simplex (flat Dirichlet), built from `k`
/// standard exponentials normalised by their sum.
pub fn sample_dirichlet_uniform<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(domain("dirichlet needs k >= 1"));
    }
    if k == 1 {
        return Ok(vec![1.0]);
    }
    let mut point: Vec<f64> = (0..k).map(|_| -open_unit(rng).ln()).collect();
    let total: f64 = point.iter().sum();
    for t in &mut point {
        *t /= total;
    }
    Ok(point)
}

pub fn geometric_pmf(k: u64, p: f64) -> f64 {
    (1.0 - p).powf(k as f64) * p
}

/// Pmf of `min(Geo(p), cap)`.
pub fn truncated_geometric_pmf(k: u64, p: f64, cap: u64) -> f64 {
    match k.cmp(&cap) {
        std::cmp::Ordering::Less => geometric_pmf(k, p),
        std::cmp::Ordering::Equal => (1.0 - p).powf(cap as f64),
        std::cmp::Ordering::Greater => 0.0,
    }
}

pub fn hypergeometric_pmf(j: u64, draws: u64, successes: u64, population: u64) -> f64 {
    let (lo, hi) = hypergeometric_support(draws, successes, population);
    if j < lo || j > hi {
        return 0.0;
    }
    (ln_binomial(successes, j) + ln_binomial(population - successes, draws - j) - ln_binomial(population, draws))
        .exp()
}

pub fn negative_binomial_pmf(k: u64, r: u64, p: f64) -> f64 {
    if p == 1.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (ln_binomial(k + r - 1, k) + k as f64 * (1.0 - p).ln() + r as f64 * p.ln()).exp()
}

/// Parameters of the three concentration bounds evaluated by [`eval_bounds`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundParams {
    delta: f64,
    mu: f64,
    r: u64,
    p: f64,
}

impl BoundParams {
    pub fn new(delta: f64, mu: f64, r: u64, p: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(domain(format!("delta = {delta} is not in (0, 1)")));
        }
        if !(mu >= 0.0) {
            return Err(domain(format!("mu = {mu} is negative")));
        }
        if r == 0 {
            return Err(domain("r must be at least 1"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(domain(format!("p = {p} is not in (0, 1)")));
        }
        Ok(Self { delta, mu, r, p })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Values of the tail bounds at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct BoundValues {
    /// `P(|X - mu| >= delta mu)` for a sum of independent hypergeometrics.
    pub hypergeometric_two_sided: f64,
    /// `P(X >= (1 + delta) r (1-p)/p)` for `X ~ N-Bin(r, p)`.
    pub negative_binomial_upper: f64,
    /// `P(X <= (1 - delta) r (1-p)/p)` for `X ~ N-Bin(r, p)`.
    pub negative_binomial_lower: f64,
}

pub fn eval_bounds(params: &BoundParams) -> BoundValues {
    let BoundParams { delta, mu, r, p } = *params;
    let r = r as f64;
    let q_delta = (1.0 - p) * delta;
    BoundValues {
        hypergeometric_two_sided: 2.0 * (-(delta * delta * mu) / 3.0).exp(),
        negative_binomial_upper: (-(q_delta * q_delta * r) / 6.0).exp(),
        negative_binomial_lower: (-(q_delta * q_delta * r) / (3.0 * (1.0 - delta * (1.0 - p)))).exp(),
    }
}
