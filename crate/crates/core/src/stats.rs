//! Goodness-of-fit tests and Monte Carlo summaries that turn simulations into
//! pass/fail verdicts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Default significance level for p-value based tests.
pub const SIGNIFICANCE: f64 = 0.01;
/// Smallest expected bucket count after pooling.
pub const MIN_EXPECTED: f64 = 5.0;

/// Verdict of one statistical check.
///
/// With a p-value the check passes when `p_value >= threshold`; without one
/// it passes when `|statistic| <= threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub suite: String,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
    pub trials: u64,
    pub seed: u64,
    pub notes: String,
}

impl TestReport {
    pub fn with_p_value(suite: impl Into<String>, statistic: f64, p_value: f64, threshold: f64) -> Self {
        Self {
            suite: suite.into(),
            statistic,
            p_value: Some(p_value),
            threshold,
            pass: p_value >= threshold,
            trials: 0,
            seed: 0,
            notes: String::new(),
        }
    }

    pub fn with_statistic(suite: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self {
            suite: suite.into(),
            statistic,
            p_value: None,
            threshold,
            pass: statistic.abs() <= threshold,
            trials: 0,
            seed: 0,
            notes: String::new(),
        }
    }

    pub fn named(mut self, suite: impl Into<String>) -> Self {
        self.suite = suite.into();
        self
    }

    pub fn seeded(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn note(mut self, text: impl AsRef<str>) -> Self {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(text.as_ref());
        self
    }

    /// Re-evaluates `pass` against a different threshold.
    pub fn at_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self.pass = match self.p_value {
            Some(p) => p >= threshold,
            None => self.statistic.abs() <= threshold,
        };
        self
    }
}

/// Asymptotic Kolmogorov tail `P(K > lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        // The alternating series converges slowly here and the tail is 1 to
        // double precision anyway.
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        let term = (-2.0 * j * j * lambda * lambda).exp();
        sum += if j as u64 % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov–Smirnov test against a continuous `cdf`, with
/// Stephens' finite-sample correction of the asymptotic p-value.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<TestReport> {
    let n = samples.len();
    if n < 50 {
        return Err(Error::Capacity(format!("KS test needs at least 50 samples, got {n}")));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::Validation("NaN sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / nf).max((i + 1) as f64 / nf - f)
        })
        .fold(0.0, f64::max);
    let root = nf.sqrt();
    let p = kolmogorov_sf((root + 0.12 + 0.11 / root) * d);
    Ok(TestReport::with_p_value("ks", d, p, SIGNIFICANCE).trials(n as u64))
}

/// Merges the rarest buckets until every expected count is at least
/// [`MIN_EXPECTED`]. Buckets are `(expected, observed...)`, pre-sorted by key;
/// pooling visits them in ascending expected order, ties by key order.
fn pool(mut buckets: Vec<(f64, Vec<f64>)>) -> Vec<(f64, Vec<f64>)> {
    loop {
        if buckets.len() < 2 {
            return buckets;
        }
        // Stable sort keeps key order among equal expectations.
        let mut order: Vec<usize> = (0..buckets.len()).collect();
        order.sort_by(|&a, &b| buckets[a].0.total_cmp(&buckets[b].0));
        let (smallest, next) = (order[0], order[1]);
        if buckets[smallest].0 >= MIN_EXPECTED {
            return buckets;
        }
        let (e, obs) = buckets[smallest].clone();
        buckets[next].0 += e;
        for (acc, o) in buckets[next].1.iter_mut().zip(obs) {
            *acc += o;
        }
        buckets.remove(smallest);
    }
}

fn chi_square_sf(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    if !statistic.is_finite() {
        return 0.0;
    }
    ChiSquared::new(dof as f64).expect("positive dof").sf(statistic)
}

/// Pearson goodness-of-fit test of `observed` counts against `expected`
/// probabilities over `trials` draws. Categories missing from `expected` have
/// probability zero. Rare buckets are pooled; dof is buckets minus one.
pub fn chi_square_test<K: Ord + Clone>(
    observed: &BTreeMap<K, u64>,
    expected: &BTreeMap<K, f64>,
    trials: u64,
) -> Result<TestReport> {
    if trials == 0 {
        return Err(Error::Capacity("chi-square test needs at least one trial".into()));
    }
    let mass: f64 = expected.values().sum();
    if expected.values().any(|&q| !(0.0..=1.0 + 1e-12).contains(&q)) || (mass - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!("expected probabilities sum to {mass}")));
    }
    if !observed.iter().any(|(k, &c)| c > 0 && expected.get(k).is_some_and(|&q| q > 0.0)) {
        return Err(Error::Validation("observed and expected supports do not overlap".into()));
    }
    let mut keys: Vec<&K> = expected.keys().chain(observed.keys()).collect();
    keys.sort();
    keys.dedup();
    let t = trials as f64;
    let buckets = keys
        .into_iter()
        .map(|k| {
            let e = expected.get(k).copied().unwrap_or(0.0) * t;
            let o = observed.get(k).copied().unwrap_or(0) as f64;
            (e, vec![o])
        })
        .collect();
    let buckets = pool(buckets);
    let statistic: f64 = buckets
        .iter()
        .map(|(e, o)| {
            let diff = o[0] - e;
            if *e > 0.0 {
                diff * diff / e
            } else if o[0] > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .sum();
    let dof = buckets.len() - 1;
    Ok(TestReport::with_p_value("chi-square", statistic, chi_square_sf(statistic, dof), SIGNIFICANCE)
        .trials(trials)
        .note(format!("dof {dof}")))
}

/// Pearson test of homogeneity between two samples of categorical values.
/// Buckets are pooled on the combined expected counts.
pub fn chi_square_two_sample<K: Ord + Clone>(a: &BTreeMap<K, u64>, b: &BTreeMap<K, u64>) -> Result<TestReport> {
    let (na, nb) = (a.values().sum::<u64>() as f64, b.values().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Capacity("both samples must be non-empty".into()));
    }
    let mut keys: Vec<&K> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    let total = na + nb;
    // Pool on the smaller of the two expected counts per bucket.
    let scale = na.min(nb) / total;
    let buckets = keys
        .into_iter()
        .map(|k| {
            let oa = a.get(k).copied().unwrap_or(0) as f64;
            let ob = b.get(k).copied().unwrap_or(0) as f64;
            ((oa + ob) * scale, vec![oa, ob])
        })
        .collect();
    let buckets = pool(buckets);
    let statistic: f64 = buckets
        .iter()
        .map(|(_, o)| {
            let row = o[0] + o[1];
            let (ea, eb) = (row * na / total, row * nb / total);
            (o[0] - ea).powi(2) / ea + (o[1] - eb).powi(2) / eb
        })
        .sum();
    let dof = buckets.len() - 1;
    Ok(
        TestReport::with_p_value("chi-square-2s", statistic, chi_square_sf(statistic, dof), SIGNIFICANCE)
            .trials((na + nb) as u64)
            .note(format!("dof {dof}")),
    )
}

/// Counts occurrences of each value.
pub fn histogram<K: Ord + Clone, I: IntoIterator<Item = K>>(values: I) -> BTreeMap<K, u64> {
    let mut h = BTreeMap::new();
    for v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

/// Checks `lo ⪯ hi` empirically: at every support point `x`,
/// `P(hi >= x) >= P(lo >= x) - 3 * SE(x)` where `SE` pools both samples.
///
/// The statistic is the worst violation clipped at zero, so the report passes
/// exactly when no point violates; the raw signed margin is in the notes.
pub fn dominance_check<T: Ord + Copy>(lo: &[T], hi: &[T]) -> Result<TestReport> {
    if lo.len() < 1000 || hi.len() < 1000 {
        return Err(Error::Capacity(format!(
            "dominance check needs at least 1000 samples per side, got {} and {}",
            lo.len(),
            hi.len()
        )));
    }
    let mut a = lo.to_vec();
    let mut b = hi.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    let mut points: Vec<T> = a.iter().chain(&b).copied().collect();
    points.sort_unstable();
    points.dedup();
    let survival = |s: &[T], x: T| (s.len() - s.partition_point(|&y| y < x)) as f64 / s.len() as f64;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_at = 0;
    for (i, &x) in points.iter().enumerate() {
        let (sa, sb) = (survival(&a, x), survival(&b, x));
        let se = (sa * (1.0 - sa) / na + sb * (1.0 - sb) / nb).sqrt();
        let margin = sa - sb - 3.0 * se;
        if margin > worst {
            worst = margin;
            worst_at = i;
        }
    }
    Ok(TestReport::with_statistic("dominance", worst.max(0.0), 0.0)
        .trials((a.len() + b.len()) as u64)
        .note(format!("worst signed margin {worst:.6} at support index {worst_at}")))
}

/// Sample mean and a four-standard-error halfwidth.
pub fn mean_ci(samples: &[f64]) -> Result<(f64, f64)> {
    let n = samples.len();
    if n < 30 {
        return Err(Error::Capacity(format!("confidence interval needs at least 30 samples, got {n}")));
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    Ok((mean, 4.0 * (var / nf).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rngdist::{sample_dirichlet_uniform, sample_geometric, RngStream};
    use rand::Rng;

    #[test]
    fn kolmogorov_tail_values() {
        assert_eq!(kolmogorov_sf(0.0), 1.0);
        // Classical critical values.
        assert!((kolmogorov_sf(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_sf(1.628) - 0.01).abs() < 1e-3);
        assert!(kolmogorov_sf(5.0) < 1e-20);
    }

    #[test]
    fn ks_rejects_constant_samples() {
        let r = ks_test(&vec![0.9; 1000], |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(r.statistic >= 0.5);
        assert!(!r.pass);
        assert!(matches!(ks_test(&[0.5; 49], |x| x), Err(Error::Capacity(_))));
    }

    #[test]
    fn ks_null_calibration() {
        let mut passes = 0;
        for rep in 0..100 {
            let mut rng = RngStream::new(100, rep);
            let xs: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
            passes += ks_test(&xs, |x| x.clamp(0.0, 1.0)).unwrap().pass as u32;
        }
        assert!(passes >= 98, "{passes}/100");
    }

    #[test]
    fn ks_on_dirichlet_marginal() {
        let mut rng = RngStream::new(101, 0);
        let xs: Vec<f64> = (0..10_000).map(|_| sample_dirichlet_uniform(4, &mut rng).unwrap()[0]).collect();
        assert!(ks_test(&xs, |x| 1.0 - (1.0 - x.clamp(0.0, 1.0)).powi(3)).unwrap().pass);
    }

    fn categorical(rng: &mut RngStream, probs: &[f64]) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, &q) in probs.iter().enumerate() {
            acc += q;
            if u < acc {
                return i;
            }
        }
        probs.len() - 1
    }

    #[test]
    fn chi_square_null_calibration_and_power() {
        let probs = [0.5, 0.25, 0.15, 0.07, 0.029, 0.001];
        let expected: BTreeMap<usize, f64> = probs.iter().copied().enumerate().collect();
        let mut passes = 0;
        for rep in 0..100 {
            let mut rng = RngStream::new(102, rep);
            let obs = histogram((0..100_000).map(|_| categorical(&mut rng, &probs)));
            passes += chi_square_test(&obs, &expected, 100_000).unwrap().pass as u32;
        }
        assert!(passes >= 98, "{passes}/100");

        let shifted = [0.48, 0.27, 0.15, 0.07, 0.029, 0.001];
        let mut rng = RngStream::new(103, 0);
        let obs = histogram((0..100_000).map(|_| categorical(&mut rng, &shifted)));
        assert!(!chi_square_test(&obs, &expected, 100_000).unwrap().pass);
    }

    #[test]
    fn chi_square_edge_cases() {
        let expected = BTreeMap::from([(1, 1.0)]);
        let r = chi_square_test(&BTreeMap::from([(1, 10u64)]), &expected, 10).unwrap();
        assert_eq!(r.p_value, Some(1.0));
        assert!(matches!(
            chi_square_test(&BTreeMap::from([(2, 10u64)]), &expected, 10),
            Err(Error::Validation(_))
        ));
        // A category the null forbids is fatal once it is not pooled away.
        let expected = BTreeMap::from([(1, 0.5), (2, 0.5)]);
        let obs = BTreeMap::from([(1, 5000u64), (2, 4000), (3, 1000)]);
        assert!(!chi_square_test(&obs, &expected, 10_000).unwrap().pass);
    }

    #[test]
    fn pooling_is_deterministic() {
        let b = vec![(1.0, vec![1.0]), (100.0, vec![90.0]), (1.0, vec![3.0]), (3.5, vec![2.0])];
        let pooled = pool(b);
        // 1.0 (first) merges into 1.0 (third), then 2.0 merges into 3.5.
        assert_eq!(pooled, vec![(100.0, vec![90.0]), (5.5, vec![6.0])]);
    }

    #[test]
    fn two_sample_chi_square() {
        let mut rng = RngStream::new(104, 0);
        let probs = [0.3, 0.3, 0.2, 0.2];
        let a = histogram((0..50_000).map(|_| categorical(&mut rng, &probs)));
        let b = histogram((0..80_000).map(|_| categorical(&mut rng, &probs)));
        assert!(chi_square_two_sample(&a, &b).unwrap().pass);
        let c = histogram((0..80_000).map(|_| categorical(&mut rng, &[0.25, 0.35, 0.2, 0.2])));
        assert!(!chi_square_two_sample(&a, &c).unwrap().pass);
    }

    #[test]
    fn dominance_examples() {
        let mut rng = RngStream::new(105, 0);
        let xs: Vec<u64> = (0..5000).map(|_| sample_geometric(0.5, &mut rng).unwrap()).collect();
        assert!(dominance_check(&xs, &xs).unwrap().pass);
        let ys: Vec<u64> = (0..5000).map(|_| sample_geometric(0.2, &mut rng).unwrap()).collect();
        assert!(dominance_check(&xs, &ys).unwrap().pass);
        assert!(!dominance_check(&ys, &xs).unwrap().pass);
        assert!(dominance_check(&xs[..999], &ys).is_err());
    }

    #[test]
    fn mean_ci_examples() {
        assert_eq!(mean_ci(&[2.5; 40]).unwrap(), (2.5, 0.0));
        let mut rng = RngStream::new(106, 0);
        let xs: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let (m, h) = mean_ci(&xs).unwrap();
        assert!((m - 0.5).abs() < 0.012);
        assert!((h - 4.0 * (1.0f64 / 12.0 / 1e4).sqrt()).abs() < 1e-3);
        assert!(mean_ci(&xs[..29]).is_err());
    }

    #[test]
    fn report_pass_rule_and_json() {
        let r = TestReport::with_statistic("s", -0.5, 1.0).seeded(3).trials(7);
        assert!(r.pass);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"suite":"s","statistic":-0.5,"p_value":null,"threshold":1.0,"pass":true,"trials":7,"seed":3,"notes":""}"#
        );
        assert!(!TestReport::with_p_value("s", 9.0, 0.001, 0.01).pass);
        assert!(TestReport::with_p_value("s", 9.0, 0.001, 0.01).at_threshold(0.0).pass);
    }
}
