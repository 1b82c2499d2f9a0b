use std::collections::BTreeMap;

use kingman_core::rngdist::{
    eval_bounds, geometric_pmf, hypergeometric_pmf, negative_binomial_pmf, sample_bernoulli,
    sample_dirichlet_uniform, sample_geometric, sample_hypergeometric, sample_negative_binomial,
    sample_truncated_geometric, truncated_geometric_pmf, BoundParams, RngStream,
};
use kingman_core::stats::{chi_square_test, histogram, ks_test};

const DRAWS: usize = 1_000_000;

fn mean(xs: impl Iterator<Item = u64>) -> f64 {
    let (s, n) = xs.fold((0u64, 0u64), |(s, n), x| (s + x, n + 1));
    s as f64 / n as f64
}

#[test]
fn bernoulli_mean() {
    let mut rng = RngStream::new(1, 0);
    let m = mean((0..DRAWS).map(|_| sample_bernoulli(0.5, &mut rng).unwrap() as u64));
    assert!((m - 0.5).abs() < 0.002, "{m}");
}

#[test]
fn geometric_mean_and_atom() {
    let mut rng = RngStream::new(2, 0);
    let m = mean((0..DRAWS).map(|_| sample_geometric(0.5, &mut rng).unwrap()));
    assert!((m - 1.0).abs() < 0.01, "{m}");
    let zeros = (0..DRAWS).filter(|_| sample_geometric(0.2, &mut rng).unwrap() == 0).count();
    let freq = zeros as f64 / DRAWS as f64;
    assert!((freq - 0.2).abs() < 0.002, "{freq}");
}

#[test]
fn truncated_geometric_collapses_tail_onto_cap() {
    let mut rng = RngStream::new(3, 0);
    let h = histogram((0..DRAWS).map(|_| sample_truncated_geometric(0.5, 2, &mut rng).unwrap()));
    assert_eq!(h.keys().copied().collect::<Vec<_>>(), vec![0, 1, 2]);
    for (k, want) in [(0, 0.5), (1, 0.25), (2, 0.25)] {
        let freq = h[&k] as f64 / DRAWS as f64;
        assert!((freq - want).abs() < 0.003, "k = {k}: {freq}");
    }
}

#[test]
fn hypergeometric_mean() {
    let mut rng = RngStream::new(4, 0);
    let m = mean((0..DRAWS).map(|_| sample_hypergeometric(5, 10, 20, &mut rng).unwrap()));
    assert!((m - 2.5).abs() < 0.01, "{m}");
}

#[test]
fn negative_binomial_mean() {
    let mut rng = RngStream::new(5, 0);
    let m = mean((0..DRAWS).map(|_| sample_negative_binomial(4, 0.5, &mut rng).unwrap()));
    assert!((m - 4.0).abs() < 0.03, "{m}");
}

#[test]
fn dirichlet_first_coordinate() {
    let mut rng = RngStream::new(6, 0);
    let xs: Vec<f64> = (0..100_000).map(|_| sample_dirichlet_uniform(4, &mut rng).unwrap()[0]).collect();
    let r = ks_test(&xs, |x| 1.0 - (1.0 - x.clamp(0.0, 1.0)).powi(3)).unwrap();
    assert!(r.pass, "{r:?}");
    for _ in 0..1000 {
        let pt = sample_dirichlet_uniform(5, &mut rng).unwrap();
        assert!((pt.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(pt.iter().all(|&t| t > 0.0));
    }
}

fn pmf_table(support: impl Iterator<Item = u64>, pmf: impl Fn(u64) -> f64) -> BTreeMap<u64, f64> {
    support.map(|k| (k, pmf(k))).collect()
}

#[test]
fn hypergeometric_both_regimes_fit_pmf() {
    // Small population; rejection regime; huge populations with small and
    // moderate means (the walk); both symmetric reductions.
    let cases = [
        (28u64, 40u64, 434u64),
        (40, 900, 1500),
        (17_998, 300, 161_991_000),
        (4_998, 40_000, 12_000_000),
        (19_000, 150_000_000, 161_991_000),
        (150_000_000, 300, 161_991_000),
    ];
    for (seed, (draws, successes, population)) in (7..).zip(cases) {
        let mut rng = RngStream::new(seed, 0);
        let trials = 200_000;
        let h = histogram((0..trials).map(|_| sample_hypergeometric(draws, successes, population, &mut rng).unwrap()));
        let (lo, hi) = (*h.keys().next().unwrap(), *h.keys().last().unwrap());
        let expected = pmf_table(lo.saturating_sub(50)..=hi + 50, |j| hypergeometric_pmf(j, draws, successes, population));
        let total: f64 = expected.values().sum();
        let expected = expected.into_iter().map(|(k, q)| (k, q / total)).collect();
        let r = chi_square_test(&h, &expected, trials as u64).unwrap();
        assert!(r.pass, "HG({draws}, {successes}, {population}): {r:?}");
    }
}

#[test]
fn pmfs_are_normalised() {
    let s: f64 = (0..200).map(|k| geometric_pmf(k, 0.3)).sum();
    assert!((s - 1.0).abs() < 1e-12);
    let s: f64 = (0..=5).map(|k| truncated_geometric_pmf(k, 0.3, 5)).sum();
    assert!((s - 1.0).abs() < 1e-12);
    let s: f64 = (0..400).map(|k| negative_binomial_pmf(k, 6, 0.2)).sum();
    assert!((s - 1.0).abs() < 1e-9);
    let s: f64 = (0..=18).map(|j| hypergeometric_pmf(j, 18, 40, 434)).sum();
    assert!((s - 1.0).abs() < 1e-12);
}

#[test]
fn bound_values_by_substitution() {
    let b = eval_bounds(&BoundParams::new(0.5, 100.0, 100, 0.5).unwrap());
    assert_eq!(b.hypergeometric_two_sided, 2.0 * (-25.0f64 / 3.0).exp());
    assert_eq!(b.negative_binomial_upper, (-100.0f64 / 96.0).exp());
}
