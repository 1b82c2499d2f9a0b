//! The Kingman coalescent on graphs and its companions: the edge-reveal
//! process that builds `G(n, p)` and its Kingman forest together, the fast
//! edge-count walk, the correspondence with uniform random recursive forests,
//! an exact small-`n` oracle, and the statistics used to check all of it.

pub mod edge_reveal;
pub mod error;
pub mod forest;
pub mod graph;
pub mod kingman;
pub mod oracle;
pub mod rngdist;
pub mod stats;
pub mod urrf;

pub use edge_reveal::{conditioned_state, fast_walk, run_erp, ErpState, WalkTrace};
pub use error::{Error, Result};
pub use forest::{LabeledEdge, PlainRootedForest, RootedForest, RootedLabeledForest};
pub use graph::{sample_gnp, Graph};
pub use kingman::{count_trees, run_kingman, CoalescentRun};
pub use oracle::{exact_c_distribution, exact_cnp_distribution, exact_mean_c, ExactDistribution};
pub use rngdist::RngStream;
pub use stats::TestReport;
pub use urrf::{phi, phi_fiber_sample, sample_urrf, sample_urrt, UrrfSample};
