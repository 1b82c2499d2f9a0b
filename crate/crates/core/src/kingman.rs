//! The Kingman coalescent on a fixed graph.
//!
//! Starting from `n` singleton trees, repeatedly pick an edge of the graph
//! joining two current roots uniformly at random, orient it uniformly, and
//! hang the tail's tree below the head. The process stops once the roots
//! form an independent set; the resulting spanning forest is the Kingman
//! forest of the graph.

use rand::Rng;

use crate::forest::{RootedForest, RootedLabeledForest};
use crate::graph::Graph;

/// Outcome of one run of the coalescent.
#[derive(Clone, Debug)]
pub struct CoalescentRun {
    pub graph: Graph,
    /// Forest after every merge (the initial empty forest first), when requested.
    pub trajectory: Option<Vec<RootedLabeledForest>>,
    pub final_forest: RootedLabeledForest,
    tree_count: usize,
}

impl CoalescentRun {
    /// Number of trees of the Kingman forest, `n - merges`.
    pub fn tree_count(&self) -> usize {
        self.tree_count
    }

    pub fn merges(&self) -> usize {
        self.final_forest.edge_count()
    }
}

/// Runs the coalescent on `graph` to completion.
///
/// Root-root candidate edges live in a flat array. A draw that lands on an
/// entry with a non-root endpoint is rejected and the entry evicted (roots
/// never come back), so every accepted draw is uniform over the valid
/// entries and each stale entry is paid for once.
pub fn run_kingman<R: Rng + ?Sized>(graph: &Graph, rng: &mut R, record_trajectory: bool) -> CoalescentRun {
    let n = graph.n();
    let mut forest = RootedLabeledForest::empty(n);
    let mut is_root = vec![true; n + 1];
    let mut candidates: Vec<(usize, usize)> = graph.edges().collect();
    let mut trajectory = record_trajectory.then(|| vec![forest.clone()]);

    while !candidates.is_empty() {
        let i = rng.random_range(0..candidates.len());
        let (a, b) = candidates.swap_remove(i);
        if !(is_root[a] && is_root[b]) {
            continue;
        }
        let (tail, head) = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
        forest.merge(tail, head).expect("candidate endpoints are roots");
        is_root[tail] = false;
        if let Some(t) = trajectory.as_mut() {
            t.push(forest.clone());
        }
    }

    let tree_count = forest.tree_count();
    CoalescentRun {
        graph: graph.clone(),
        trajectory,
        final_forest: forest,
        tree_count,
    }
}

/// Number of trees in the run's final forest.
pub fn count_trees(run: &CoalescentRun) -> usize {
    run.tree_count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rngdist::RngStream;

    fn assert_run_invariants(run: &CoalescentRun) {
        let f = &run.final_forest;
        f.validate().unwrap();
        assert_eq!(f.n(), run.graph.n());
        for e in f.edges() {
            assert!(run.graph.has_edge(e.tail, e.head).unwrap());
        }
        assert!(run.graph.is_independent(&f.roots()));
        assert_eq!(run.tree_count(), f.roots().len());
        assert_eq!(run.graph.n() - run.tree_count(), run.merges());
    }

    #[test]
    fn empty_and_complete_graphs() {
        let mut rng = RngStream::new(5, 0);
        for n in 1..8 {
            let run = run_kingman(&Graph::empty(n), &mut rng, false);
            assert_eq!(run.tree_count(), n);
            assert_eq!(run.final_forest.edge_count(), 0);
            let run = run_kingman(&Graph::complete(n), &mut rng, false);
            assert_eq!(count_trees(&run), 1);
            assert_run_invariants(&run);
        }
    }

    #[test]
    fn trajectory_snapshots_every_merge() {
        let mut rng = RngStream::new(6, 0);
        let run = run_kingman(&Graph::complete(6), &mut rng, true);
        let t = run.trajectory.as_ref().unwrap();
        assert_eq!(t.len(), 6);
        for (i, f) in t.iter().enumerate() {
            assert_eq!(f.edge_count(), i);
        }
        assert_eq!(t.last().unwrap(), &run.final_forest);
    }

    #[test]
    fn five_vertex_realisation() {
        let g = Graph::from_edges(5, &[(1, 2), (1, 4), (4, 5), (4, 3), (1, 3)]).unwrap();
        let mut f = RootedLabeledForest::empty(5);
        for (tail, head) in [(3, 1), (4, 1), (1, 2)] {
            f.merge(tail, head).unwrap();
            assert!(g.has_edge(tail, head).unwrap());
        }
        assert_eq!(f.roots(), vec![2, 5]);
        assert!(g.is_independent(&f.roots()));
        assert_eq!(f.tree_count(), 2);
    }

    #[test]
    fn random_graph_invariants() {
        for trial in 0..300 {
            let mut rng = RngStream::new(7, trial);
            let g = crate::graph::sample_gnp(12, 0.3, &mut rng).unwrap();
            assert_run_invariants(&run_kingman(&g, &mut rng, false));
        }
    }

    #[test]
    fn path_graph_law() {
        // Either endpoint removal (prob 1/2) leaves an adjacent root pair.
        let g = Graph::from_edges(3, &[(1, 2), (2, 3)]).unwrap();
        let trials = 1_000_000u64;
        let mut rng = RngStream::new(8, 0);
        let ones = (0..trials)
            .filter(|_| run_kingman(&g, &mut rng, false).tree_count() == 1)
            .count() as f64;
        let freq = ones / trials as f64;
        assert!((freq - 0.5).abs() < 0.002, "freq {freq}");
    }
}
