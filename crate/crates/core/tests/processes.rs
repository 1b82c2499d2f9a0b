//! Laws of the coalescent, the edge-reveal process and the fast walk.

use std::collections::BTreeMap;

use kingman_core::edge_reveal::{conditioned_state, fast_walk, run_erp, run_erp_with, ErpState};
use kingman_core::forest::enumerate_labeled_forests;
use kingman_core::graph::{choose2, sample_gnp};
use kingman_core::oracle::exact_cnp_distribution;
use kingman_core::stats::{chi_square_test, chi_square_two_sample, histogram};
use kingman_core::{run_kingman, RngStream};
use proptest::prelude::*;

const TRIALS: u64 = 100_000;

#[test]
fn two_vertex_erp() {
    let trials = 1_000_000;
    let mut rng = RngStream::new(1, 0);
    let ones = (0..trials)
        .filter(|_| run_erp(2, 0.5, &mut rng).unwrap().1.tree_count() == 1)
        .count();
    let freq = ones as f64 / trials as f64;
    assert!((freq - 0.5).abs() < 0.002, "{freq}");
}

#[test]
fn three_methods_agree_with_each_other_and_the_oracle() {
    for (i, (n, p)) in [(4, 0.3), (4, 0.6), (5, 0.3), (5, 0.6)].into_iter().enumerate() {
        let seed = 10 + i as u64;
        let mut rng = RngStream::new(seed, 0);
        let direct = histogram((0..TRIALS).map(|_| {
            let g = sample_gnp(n, p, &mut rng).unwrap();
            run_kingman(&g, &mut rng, false).tree_count()
        }));
        let mut rng = RngStream::new(seed, 1);
        let erp = histogram((0..TRIALS).map(|_| run_erp(n, p, &mut rng).unwrap().1.tree_count()));
        let mut rng = RngStream::new(seed, 2);
        let walk = histogram((0..TRIALS).map(|_| fast_walk(n, p, &mut rng).unwrap().tree_count()));
        let exact = exact_cnp_distribution(n, p).unwrap().to_f64_map();
        for (name, h) in [("direct", &direct), ("erp", &erp), ("walk", &walk)] {
            let r = chi_square_test(h, &exact, TRIALS).unwrap();
            assert!(r.pass, "{name} vs oracle at ({n}, {p}): {r:?}");
        }
        for (a, b) in [(&direct, &erp), (&direct, &walk), (&erp, &walk)] {
            let r = chi_square_two_sample(a, b).unwrap();
            assert!(r.pass, "pairwise at ({n}, {p}): {r:?}");
        }
    }
}

#[test]
fn forests_with_two_trees_are_uniform_on_four_vertices() {
    let trials = 200_000;
    let mut rng = RngStream::new(20, 0);
    let mut counts: BTreeMap<Vec<(u8, u8)>, u64> = BTreeMap::new();
    let mut total = 0;
    for _ in 0..trials {
        let g = sample_gnp(4, 0.5, &mut rng).unwrap();
        let run = run_kingman(&g, &mut rng, false);
        if run.tree_count() == 2 {
            *counts.entry(run.final_forest.labeled_key()).or_insert(0) += 1;
            total += 1;
        }
    }
    let all = enumerate_labeled_forests(4, 2).unwrap();
    assert_eq!(all.len(), 72);
    let uniform: BTreeMap<_, _> = all.iter().map(|f| (f.labeled_key(), 1.0 / 72.0)).collect();
    let r = chi_square_test(&counts, &uniform, total).unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn conditioned_forest_is_uniform() {
    let mut rng = RngStream::new(21, 0);
    let all = enumerate_labeled_forests(6, 3).unwrap();
    let uniform: BTreeMap<_, _> = all.iter().map(|f| (f.labeled_key(), 1.0 / all.len() as f64)).collect();
    let counts = histogram((0..TRIALS).map(|_| {
        let s = conditioned_state(6, 0.5, 3, 2, &mut rng).unwrap();
        assert_eq!(s.complement_edge_count(), 2);
        s.forest().labeled_key()
    }));
    let r = chi_square_test(&counts, &uniform, TRIALS).unwrap();
    assert!(r.pass, "{r:?}");
    assert!(conditioned_state(6, 0.5, 3, 4, &mut rng).is_err());
}

#[test]
fn full_coupling_reveals_a_gnp_graph() {
    // Edge count of the materialised graph is Bin(C(n,2), p).
    let (n, p) = (7, 0.4);
    let pairs = choose2(n as u64);
    let mut rng = RngStream::new(23, 0);
    let counts = histogram((0..TRIALS).map(|_| {
        let (mut state, _) = run_erp_with(n, p, true, &mut rng).unwrap();
        state.underlying_graph(&mut rng).edge_count() as u64
    }));
    let binomial: BTreeMap<u64, f64> = (0..=pairs)
        .map(|m| {
            let ln = statrs::function::factorial::ln_binomial(pairs, m)
                + m as f64 * p.ln()
                + (pairs - m) as f64 * (1.0 - p).ln();
            (m, ln.exp())
        })
        .collect();
    let mass: f64 = binomial.values().sum();
    let binomial = binomial.into_iter().map(|(k, q)| (k, q / mass)).collect();
    let r = chi_square_test(&counts, &binomial, TRIALS).unwrap();
    assert!(r.pass, "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn erp_invariants(n in 1usize..14, p in 0.05f64..1.0, seed in any::<u64>(), track in any::<bool>()) {
        let mut rng = RngStream::new(seed, 0);
        let mut state = ErpState::new(n, p, track).unwrap();
        while !state.is_terminated() {
            state.erp_step(&mut rng);
            prop_assert!(state.check_invariants().is_ok());
        }
        let trace = state.walk_trace();
        prop_assert_eq!(trace.tree_count(), state.root_count());
        prop_assert_eq!(trace.m_at(0), Some(0));
    }

    #[test]
    fn walk_freezes_at_first_crossing(n in 1usize..300, p in 0.01f64..1.0, seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 0);
        let w = fast_walk(n, p, &mut rng).unwrap();
        let j = w.j_star().unwrap();
        prop_assert_eq!(w.m()[0], 0);
        prop_assert!(w.m()[j] >= choose2((n - j) as u64));
        prop_assert!((0..j).all(|i| w.m()[i] < choose2((n - i) as u64)));
        prop_assert_eq!(w.m_at(j + 1), w.m_at(j));
        prop_assert!(w.tree_count() >= 1 && w.tree_count() <= n);
    }
}
