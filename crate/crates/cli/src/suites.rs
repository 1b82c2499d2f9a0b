//! Named verification suites. Each returns one [`TestReport`] per check and
//! embeds the seed and trial count so every verdict can be replayed.
//!
//! Suite number `s` (in declaration order, from 0) draws its random
//! sub-experiments from stream blocks `16 (s + 1) + i`, so suites never share
//! streams.

use std::collections::{BTreeMap, HashSet};

use clap::ValueEnum;

use kingman_core::edge_reveal::{conditioned_state, fast_walk, run_erp};
use kingman_core::forest::{
    enumerate_increasing_forests, for_each_labeled_forest, increasing_forest_count, labeled_forest_count,
};
use kingman_core::graph::choose2;
use kingman_core::oracle::{exact_c_distribution, exact_cnp_distribution};
use kingman_core::rngdist::{
    eval_bounds, geometric_pmf, hypergeometric_pmf, negative_binomial_pmf, sample_bernoulli,
    sample_dirichlet_uniform, sample_geometric, sample_hypergeometric, sample_negative_binomial,
    sample_truncated_geometric, truncated_geometric_pmf, BoundParams,
};
use kingman_core::stats::{
    chi_square_test, chi_square_two_sample, dominance_check, histogram, ks_test, mean_ci, TestReport,
};
use kingman_core::urrf::{delete_root_block_edges, phi, sample_urrt};
use kingman_core::{
    run_kingman, sample_gnp, Error, Graph, LabeledEdge, PlainRootedForest, Result, RootedForest,
    RootedLabeledForest,
};
use rand::Rng;

use crate::run_trials;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Counting,
    Phi,
    Equivalence,
    Uniformity,
    StepLaw,
    Dirichlet,
    Height,
    Monotonicity,
    Bounds,
    NullCalibration,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Counting => "counting",
            Suite::Phi => "phi",
            Suite::Equivalence => "equivalence",
            Suite::Uniformity => "uniformity",
            Suite::StepLaw => "step-law",
            Suite::Dirichlet => "dirichlet",
            Suite::Height => "height",
            Suite::Monotonicity => "monotonicity",
            Suite::Bounds => "bounds",
            Suite::NullCalibration => "null-calibration",
        }
    }

    fn base_block(self) -> u64 {
        16 * (1 + self as u64)
    }
}

/// Overrides for a suite's defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyConfig {
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub trials: Option<u64>,
    pub seed: u64,
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<TestReport>> {
    let reports = match suite {
        Suite::Counting => counting()?,
        Suite::Phi => phi_regularity()?,
        Suite::Equivalence => equivalence(cfg)?,
        Suite::Uniformity => uniformity(cfg)?,
        Suite::StepLaw => step_law(cfg)?,
        Suite::Dirichlet => dirichlet(cfg)?,
        Suite::Height => height(cfg)?,
        Suite::Monotonicity => monotonicity(cfg)?,
        Suite::Bounds => bounds(cfg)?,
        Suite::NullCalibration => null_calibration(cfg)?,
    };
    Ok(reports.into_iter().map(|r| r.named(suite.name()).seeded(cfg.seed)).collect())
}

fn exact(suite: &str, mismatches: usize, checked: u64, notes: String) -> TestReport {
    TestReport::with_statistic(suite, mismatches as f64, 0.0).trials(checked).note(notes)
}

/// Enumerated sizes of `F_{n,n-k}` (n <= 6) and `R_{n,k}` (n <= 7) against
/// their closed forms, with every enumerated element valid and distinct.
pub fn counting() -> Result<Vec<TestReport>> {
    let mut bad = 0;
    let mut seen_total = 0u64;
    for n in 1..=6usize {
        for k in 1..=n {
            let mut keys = HashSet::new();
            let mut invalid = 0;
            for_each_labeled_forest(n, n - k, |f| {
                if f.validate().is_err() || f.tree_count() != k {
                    invalid += 1;
                }
                keys.insert(f.labeled_key());
            })?;
            seen_total += keys.len() as u64;
            if invalid > 0 || keys.len() as u128 != labeled_forest_count(n as u64, k as u64) {
                bad += 1;
            }
        }
    }
    let labeled = exact("", bad, seen_total, "labeled forests, 1 <= k <= n <= 6".into());

    let mut bad = 0;
    let mut seen_total = 0u64;
    for n in 1..=7usize {
        for k in 1..=n {
            let all = enumerate_increasing_forests(n, k)?;
            let keys: HashSet<_> = all.iter().map(|f| f.shape_key()).collect();
            let valid = all.iter().all(|f| f.is_recursive_forest() && f.tree_count() == k);
            seen_total += keys.len() as u64;
            if !valid || keys.len() != all.len() || all.len() as u128 != increasing_forest_count(n as u64, k as u64) {
                bad += 1;
            }
        }
    }
    let increasing = exact("", bad, seen_total, "increasing forests, 1 <= k <= n <= 7".into());
    Ok(vec![labeled, increasing])
}

/// A small labelled forest and its image under the relabelling map.
pub fn worked_example_input() -> RootedLabeledForest {
    let e = |tail, head, label| LabeledEdge { tail, head, label };
    RootedLabeledForest::from_edges(5, &[e(3, 1, 1), e(4, 1, 2), e(1, 2, 3)]).expect("valid forest")
}

pub fn worked_example_output() -> PlainRootedForest {
    PlainRootedForest::from_parents(vec![None, None, Some(1), Some(3), Some(3)]).expect("valid forest")
}

/// Every fibre of the relabelling map over `R_{n,k}` has `n!/k!` elements,
/// for `n` in {4, 5} and all `k`; plus the worked example.
pub fn phi_regularity() -> Result<Vec<TestReport>> {
    let fact = |x: usize| (1..=x).product::<usize>();
    let mut reports = Vec::new();
    for n in [4usize, 5] {
        let mut bad = 0;
        let mut images = 0u64;
        for k in 1..=n {
            let mut fibres: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
            let mut outside = 0;
            for_each_labeled_forest(n, n - k, |f| {
                images += 1;
                match phi(f) {
                    Ok(t) if t.is_recursive_forest() && t.tree_count() == k => {
                        *fibres.entry(t.shape_key()).or_insert(0) += 1
                    }
                    _ => outside += 1,
                }
            })?;
            let targets = enumerate_increasing_forests(n, k)?;
            let regular = targets.iter().all(|t| fibres.get(&t.shape_key()) == Some(&(fact(n) / fact(k))));
            if outside > 0 || fibres.len() != targets.len() || !regular {
                bad += 1;
            }
        }
        reports.push(exact("", bad, images, format!("fibre sizes n!/k!, n = {n}, all k")));
    }
    let matches = phi(&worked_example_input())? == worked_example_output();
    reports.push(exact("", usize::from(!matches), 1, "worked example image".into()));
    Ok(reports)
}

fn method_counts<F>(seed: u64, block: u64, trials: u64, f: F) -> Result<BTreeMap<usize, u64>>
where
    F: Fn(&mut kingman_core::RngStream) -> Result<usize> + Sync,
{
    Ok(histogram(run_trials(seed, block, trials, |rng, _| f(rng))?))
}

/// Tree-count laws from the direct coalescent, the edge-reveal process and
/// the walk, pairwise and against the exact law.
pub fn equivalence(cfg: &VerifyConfig) -> Result<Vec<TestReport>> {
    let trials = cfg.trials.unwrap_or(100_000);
    let configs = if cfg.n.is_some() || cfg.p.is_some() {
        vec![(cfg.n.unwrap_or(5), cfg.p.unwrap_or(0.5))]
    } else {
        vec![(5, 0.5), (4, 0.3)]
    };
    let base = Suite::Equivalence.base_block();
    let mut reports = Vec::new();
    for (i, (n, p)) in configs.into_iter().enumerate() {
        let block = base + 3 * i as u64;
        let direct = method_counts(cfg.seed, block, trials, |rng| {
            let g = sample_gnp(n, p, rng)?;
            Ok(run_kingman(&g, rng, false).tree_count())
        })?;
        let erp = method_counts(cfg.seed, block + 1, trials, |rng| Ok(run_erp(n, p, rng)?.1.tree_count()))?;
        let walk = method_counts(cfg.seed, block + 2, trials, |rng| Ok(fast_walk(n, p, rng)?.tree_count()))?;
        let oracle = exact_cnp_distribution(n, p)?.to_f64_map();
        let samples = [("direct", &direct), ("erp", &erp), ("walk", &walk)];
        for (name, h) in samples {
            reports.push(chi_square_test(h, &oracle, trials)?.note(format!("{name} vs exact, n = {n}, p = {p}")));
        }
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            reports.push(
                chi_square_two_sample(samples[a].1, samples[b].1)?
                    .note(format!("{} vs {}, n = {n}, p = {p}", samples[a].0, samples[b].0)),
            );
        }
    }
    Ok(reports)
}

/// Kingman forests of `G(n, p)` with the most common tree count `c` are
/// uniform over the labelled forests with `n - c` edges.
pub fn uniformity(cfg: &VerifyConfig) -> Result<Vec<TestReport>> {
    let (n, p) = (cfg.n.unwrap_or(4), cfg.p.unwrap_or(0.5));
    let trials = cfg.trials.unwrap_or(200_000);
    if n > 6 {
        return Err(Error::Capacity(format!("uniformity enumerates F(n, m); n = {n} > 6")));
    }
    let forests = run_trials(cfg.seed, Suite::Uniformity.base_block(), trials, |rng, _| {
        let g = sample_gnp(n, p, rng)?;
        Ok(run_kingman(&g, rng, false).final_forest)
    })?;
    let by_count = histogram(forests.iter().map(|f| f.tree_count()));
    let (&c, &group) = by_count
        .iter()
        .max_by_key(|&(c, count)| (*count, std::cmp::Reverse(*c)))
        .expect("at least one trial");
    let observed = histogram(forests.iter().filter(|f| f.tree_count() == c).map(|f| f.labeled_key()));
    let mut keys = Vec::new();
    for_each_labeled_forest(n, n - c, |f| keys.push(f.labeled_key()))?;
    let uniform: BTreeMap<_, _> = keys.iter().map(|k| (k.clone(), 1.0 / keys.len() as f64)).collect();
    Ok(vec![chi_square_test(&observed, &uniform, group)?.note(format!(
        "n = {n}, p = {p}, largest group has {c} trees ({group} of {trials} runs, {} forests)",
        keys.len()
    ))])
}

pub const STEP_LAW_N: usize = 30;
pub const STEP_LAW_ROOTS: usize = 20;
pub const STEP_LAW_EDGES: u64 = 40;

/// One coalescing epoch from the exact conditional state: new non-edges
/// against the truncated geometric law, complement degree removed at the
/// merge against its hypergeometric mixture.
pub fn step_law(cfg: &VerifyConfig) -> Result<Vec<TestReport>> {
    let p = cfg.p.unwrap_or(0.5);
    let trials = cfg.trials.unwrap_or(100_000);
    let (n, roots, m) = (STEP_LAW_N, STEP_LAW_ROOTS, STEP_LAW_EDGES);
    let epochs = run_trials(cfg.seed, Suite::StepLaw.base_block(), trials, |rng, _| {
        let mut state = conditioned_state(n, p, roots, m, rng)?;
        Ok(state.run_epoch(rng))
    })?;
    let pairs = choose2(roots as u64);
    let cap = pairs - m;
    let x_law: BTreeMap<u64, f64> = (0..=cap).map(|x| (x, truncated_geometric_pmf(x, p, cap))).collect();
    let x_obs = histogram(epochs.iter().map(|e| e.fresh_non_edges));

    let merge_mass = 1.0 - truncated_geometric_pmf(cap, p, cap);
    let draws = roots as u64 - 2;
    let mut y_law: BTreeMap<u64, f64> = BTreeMap::new();
    for x in 0..cap {
        let w = geometric_pmf(x, p) / merge_mass;
        for y in 0..=draws {
            *y_law.entry(y).or_insert(0.0) += w * hypergeometric_pmf(y, draws, m + x, pairs - 1);
        }
    }
    let merged: Vec<u64> = epochs.iter().filter_map(|e| e.removed).collect();
    let y_obs = histogram(merged.iter().copied());
    Ok(vec![
        chi_square_test(&x_obs, &x_law, trials)?.trials(trials).note(format!(
            "new non-edges per epoch vs truncated Geo({p}) at {cap}"
        )),
        chi_square_test(&y_obs, &y_law, merged.len() as u64)?
            .note(format!("removed complement degree vs hypergeometric mixture, p = {p}")),
    ])
}

pub const DIRICHLET_N: usize = 5000;
pub const DIRICHLET_P: f64 = 0.25;
pub const DIRICHLET_MIN_SAMPLES: usize = 5000;

/// Tree counts from the walk; for runs with the modal count `k`, the forest
/// structure from a recursive tree with its first `k - 1` edges deleted. The
/// first tree's share of the vertices is tested against `Beta(1, k - 1)`.
pub fn dirichlet(cfg: &VerifyConfig) -> Result<Vec<TestReport>> {
    let (n, p) = (cfg.n.unwrap_or(DIRICHLET_N), cfg.p.unwrap_or(DIRICHLET_P));
    let trials = cfg.trials.unwrap_or(30_000);
    let base = Suite::Dirichlet.base_block();
    let counts = run_trials(cfg.seed, base, trials, |rng, _| Ok(fast_walk(n, p, rng)?.tree_count()))?;
    let by_count = histogram(counts.iter().copied());
    let (&k, &group) = by_count
        .iter()
        .max_by_key(|&(c, count)| (*count, std::cmp::Reverse(*c)))
        .expect("at least one trial");
    let modal: Vec<u64> = (0..trials).filter(|&t| counts[t as usize] == k).collect();
    let shares = run_trials(cfg.seed, base + 1, modal.len() as u64, |rng, _| {
        let f = delete_root_block_edges(&sample_urrt(n, rng)?, k)?;
        Ok(f.tree_sizes()[0] as f64 / n as f64)
    })?;
    let notes = format!("n = {n}, p = {p}, modal tree count {k} in {group} of {trials} runs");
    if k < 2 || shares.len() < DIRICHLET_MIN_SAMPLES {
        return Ok(vec![TestReport::with_p_value("", f64::NAN, 0.0, kingman_core::stats::SIGNIFICANCE)
            .trials(shares.len() as u64)
            .note(format!("{notes}; need k >= 2 and {DIRICHLET_MIN_SAMPLES} samples"))]);
    }
    let fit = ks_test(&shares, |x| 1.0 - (1.0 - x.clamp(0.0, 1.0)).powi(k as i32 - 1))?.note(&notes);
    let modal_shortfall = 3usize.saturating_sub(k) as f64;
    Ok(vec![
        fit,
        TestReport::with_statistic("", modal_shortfall, 0.0)
            .trials(trials)
            .note(format!("{notes}; modal tree count must be at least 3")),
    ])
}

pub const HEIGHT_N: usize = 3000;
pub const HEIGHT_P: f64 = 0.3;
pub const HEIGHT_WINDOW: f64 = 5.0;

/// Deletion coupling: per draw `height(T) - C <= height(F) <= height(T)`;
/// the mean forest height sits within a window of `e ln n - 1.5 ln ln n`.
pub fn height(cfg: &VerifyConfig) -> Result<Vec<TestReport>> {
    let (n, p) = (cfg.n.unwrap_or(HEIGHT_N), cfg.p.unwrap_or(HEIGHT_P));
    let trials = cfg.trials.unwrap_or(10_000);
    let draws = run_trials(cfg.seed, Suite::Height.base_block(), trials, |rng, _| {
        let c = fast_walk(n, p, rng)?.tree_count();
        let tree = sample_urrt(n, rng)?;
        let forest = delete_root_block_edges(&tree, c)?;
        Ok((c, tree.forest.height(), forest.height()))
    })?;
    let violations = draws
        .iter()
        .filter(|&&(c, ht, hf)| !(ht.saturating_sub(c) <= hf && hf <= ht))
        .count();
    let heights: Vec<f64> = draws.iter().map(|&(_, _, hf)| hf as f64).collect();
    let (mean, half) = mean_ci(&heights)?;
    let ln = (n as f64).ln();
    let centre = std::f64::consts::E * ln - 1.5 * ln.ln();
    Ok(vec![
        TestReport::with_statistic("", violations as f64, 0.0)
            .trials(trials)
            .note(format!("sandwich violations, n = {n}, p = {p}")),
        TestReport::with_statistic("", mean - centre, HEIGHT_WINDOW)
            .trials(trials)
            .note(format!("mean forest height {mean:.3} +/- {half:.3} vs centre {centre:.3}")),
    ])
}

pub const MONOTONICITY_NS: [usize; 4] = [5, 10, 20, 40];

/// Tree counts are stochastically nondecreasing in `n`: simulated for
/// consecutive sizes, exact for `n <= 6`.
pub fn monotonicity(cfg: &VerifyConfig) -> Result<Vec<TestReport>> {
    let p = cfg.p.unwrap_or(0.5);
    let trials = cfg.trials.unwrap_or(100_000);
    let base = Suite::Monotonicity.base_block();
    let mut samples = Vec::new();
    for (i, &n) in MONOTONICITY_NS.iter().enumerate() {
        samples.push(run_trials(cfg.seed, base + i as u64, trials, |rng, _| {
            Ok(fast_walk(n, p, rng)?.tree_count())
        })?);
    }
    let mut reports = Vec::new();
    for (i, w) in samples.windows(2).enumerate() {
        let (lo, hi) = (MONOTONICITY_NS[i], MONOTONICITY_NS[i + 1]);
        reports.push(dominance_check(&w[0], &w[1])?.note(format!("n = {lo} vs n = {hi}, p = {p}")));
    }
    let means: Vec<_> = (1..=6).map(|n| exact_cnp_distribution(n, p).map(|d| d.mean())).collect::<Result<_>>()?;
    let drops = means.windows(2).filter(|w| w[1] < w[0]).count();
    reports.push(exact("", drops, 6, format!("exact means nondecreasing for n <= 6, p = {p}")));
    Ok(reports)
}

pub const BOUNDS_ELLS: [usize; 6] = [10, 25, 50, 100, 200, 300];

/// Report-only: how often the walk overshoots `(1 + eps)(1 - p)(n - k)/p`
/// at some `k <= n - l`, as a function of `l`; and the tail bounds at two
/// reference points.
pub fn bounds(cfg: &VerifyConfig) -> Result<Vec<TestReport>> {
    let (n, p, eps) = (cfg.n.unwrap_or(400), cfg.p.unwrap_or(0.2), 0.5);
    let trials = cfg.trials.unwrap_or(10_000);
    let walks = run_trials(cfg.seed, Suite::Bounds.base_block(), trials, |rng, _| fast_walk(n, p, rng))?;
    let mut reports = Vec::new();
    for &ell in BOUNDS_ELLS.iter().filter(|&&l| l <= n) {
        let hits = walks
            .iter()
            .filter(|w| {
                (0..=n - ell).any(|k| {
                    let mk = w.m_at(k).unwrap_or(0) as f64;
                    mk >= (1.0 + eps) * (1.0 - p) * (n - k) as f64 / p
                })
            })
            .count();
        reports.push(
            TestReport::with_statistic("", hits as f64 / trials as f64, 1.0)
                .trials(trials)
                .note(format!("overshoot frequency, n = {n}, p = {p}, eps = {eps}, l = {ell}")),
        );
    }
    let a = eval_bounds(&BoundParams::new(0.5, 100.0, 1, 0.5)?);
    let b = eval_bounds(&BoundParams::new(0.5, 1.0, 100, 0.5)?);
    let hand = [2.0 * (-25.0f64 / 3.0).exp(), (-100.0f64 / 96.0).exp()];
    let diff = (a.hypergeometric_two_sided - hand[0]).abs().max((b.negative_binomial_upper - hand[1]).abs());
    reports.push(TestReport::with_statistic("", diff, 0.0).note(format!(
        "bounds at delta = 0.5: mu = 100 gives {:e}, r = 100, p = 0.5 gives {:e}",
        a.hypergeometric_two_sided, b.negative_binomial_upper
    )));
    Ok(reports)
}

pub const NULL_REPETITIONS: u64 = 100;
pub const NULL_MAX_REJECTION: f64 = 0.03;

fn categorical<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> usize {
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

/// Rejection rates of each test on data drawn from its own null.
pub fn null_calibration(cfg: &VerifyConfig) -> Result<Vec<TestReport>> {
    let reps = cfg.trials.unwrap_or(NULL_REPETITIONS);
    let base = Suite::NullCalibration.base_block();
    let probs = [0.4, 0.25, 0.2, 0.1, 0.04, 0.01];
    let expected: BTreeMap<usize, f64> = probs.iter().copied().enumerate().collect();
    let rate = |passes: Vec<bool>| passes.iter().filter(|&&ok| !ok).count() as f64 / passes.len() as f64;

    let ks = rate(run_trials(cfg.seed, base, reps, |rng, _| {
        let xs: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        Ok(ks_test(&xs, |x| x.clamp(0.0, 1.0))?.pass)
    })?);
    let chi = rate(run_trials(cfg.seed, base + 1, reps, |rng, _| {
        let h = histogram((0..100_000).map(|_| categorical(rng, &probs)));
        Ok(chi_square_test(&h, &expected, 100_000)?.pass)
    })?);
    let two = rate(run_trials(cfg.seed, base + 2, reps, |rng, _| {
        let a = histogram((0..20_000).map(|_| categorical(rng, &probs)));
        let b = histogram((0..20_000).map(|_| categorical(rng, &probs)));
        Ok(chi_square_two_sample(&a, &b)?.pass)
    })?);
    let dom = rate(run_trials(cfg.seed, base + 3, reps, |rng, _| {
        let a: Vec<u64> = (0..5_000).map(|_| sample_geometric(0.5, rng)).collect::<Result<_>>()?;
        let b: Vec<u64> = (0..5_000).map(|_| sample_geometric(0.5, rng)).collect::<Result<_>>()?;
        Ok(dominance_check(&a, &b)?.pass)
    })?);
    Ok([("ks", ks), ("chi-square", chi), ("chi-square two-sample", two), ("dominance", dom)]
        .into_iter()
        .map(|(name, r)| {
            TestReport::with_statistic("", r, NULL_MAX_REJECTION)
                .trials(reps)
                .note(format!("{name} rejection rate on null data"))
        })
        .collect())
}

/// Goodness of fit of every sampler against its own pmf or cdf.
pub fn samplers(seed: u64, draws: u64) -> Result<Vec<TestReport>> {
    const BASE: u64 = 1 << 20;
    fn fit(
        seed: u64,
        block: u64,
        draws: u64,
        name: &str,
        sample: impl Fn(&mut kingman_core::RngStream) -> Result<u64> + Sync,
        pmf: impl Fn(u64) -> f64,
    ) -> Result<TestReport> {
        // One stream per chunk of draws keeps the work parallel.
        let chunk = 10_000u64;
        let chunks = draws.div_ceil(chunk);
        let parts = run_trials(seed, block, chunks, |rng, c| {
            let len = chunk.min(draws - c * chunk);
            (0..len).map(|_| sample(rng)).collect::<Result<Vec<u64>>>()
        })?;
        let observed = histogram(parts.into_iter().flatten());
        let top = *observed.keys().last().expect("draws > 0");
        // Support out to well past the largest draw; the remainder is
        // negligible and lumped with the last category. Log-gamma pmfs can
        // overshoot a total of one by rounding, hence the rescale.
        let mut law: BTreeMap<u64, f64> = (0..=top + 50).map(|k| (k, pmf(k))).collect();
        let rest = 1.0 - law.values().sum::<f64>();
        *law.get_mut(&(top + 50)).expect("present") += rest.max(0.0);
        let total: f64 = law.values().sum();
        law.values_mut().for_each(|q| *q /= total);
        Ok(chi_square_test(&observed, &law, draws)?.note(name))
    }
    let (p, cap) = (0.3, 6);
    let mut reports = vec![
        fit(seed, BASE, draws, "bernoulli(0.3)", |r| Ok(sample_bernoulli(p, r)? as u64), |k| match k {
            0 => 1.0 - p,
            1 => p,
            _ => 0.0,
        })?,
        fit(seed, BASE + 1, draws, "geometric(0.3)", |r| sample_geometric(p, r), |k| geometric_pmf(k, p))?,
        fit(seed, BASE + 2, draws, "truncated geometric(0.3, 6)", |r| sample_truncated_geometric(p, cap, r), |k| {
            truncated_geometric_pmf(k, p, cap)
        })?,
        fit(seed, BASE + 3, draws, "hypergeometric(18, 40, 189)", |r| sample_hypergeometric(18, 40, 189, r), |j| {
            hypergeometric_pmf(j, 18, 40, 189)
        })?,
        fit(
            seed,
            BASE + 4,
            draws,
            "hypergeometric(2998, 12000, 4495501)",
            |r| sample_hypergeometric(2998, 12_000, 4_495_501, r),
            |j| hypergeometric_pmf(j, 2998, 12_000, 4_495_501),
        )?,
        fit(
            seed,
            BASE + 5,
            draws,
            "hypergeometric(400, 9000, 20000)",
            |r| sample_hypergeometric(400, 9000, 20_000, r),
            |j| hypergeometric_pmf(j, 400, 9000, 20_000),
        )?,
        fit(seed, BASE + 6, draws, "negative binomial(4, 0.3)", |r| sample_negative_binomial(4, p, r), |k| {
            negative_binomial_pmf(k, 4, p)
        })?,
    ];
    let xs: Vec<f64> = run_trials(seed, BASE + 7, draws, |rng, _| Ok(sample_dirichlet_uniform(4, rng)?[0]))?;
    reports.push(ks_test(&xs, |x| 1.0 - (1.0 - x.clamp(0.0, 1.0)).powi(3))?.note("flat dirichlet(4), first coordinate"));
    Ok(reports.into_iter().map(|r| r.named("samplers").seeded(seed)).collect())
}

/// Exploratory: does adding an edge ever raise the exact mean tree count?
/// Every graph on `n` vertices and every missing edge is checked.
pub fn edge_addition(n: usize) -> Result<TestReport> {
    if n > 5 {
        return Err(Error::Capacity(format!("edge addition scan enumerates all graphs; n = {n} > 5")));
    }
    let pairs = choose2(n as u64) as u32;
    let means: Vec<_> = (0u128..1 << pairs)
        .map(|mask| exact_c_distribution(&Graph::from_mask(n, mask)).map(|d| d.mean()))
        .collect::<Result<_>>()?;
    let mut checked = 0u64;
    let mut raised = 0usize;
    for mask in 0..1usize << pairs {
        for bit in 0..pairs {
            if mask >> bit & 1 == 0 {
                checked += 1;
                if means[mask | 1 << bit] > means[mask] {
                    raised += 1;
                }
            }
        }
    }
    Ok(TestReport::with_statistic("explore", raised as f64 / checked as f64, 1.0)
        .trials(checked)
        .note(format!("fraction of single-edge additions raising the mean, n = {n}")))
}
