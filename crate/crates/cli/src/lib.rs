//! Reproducible, parallel experiment runner over the `kingman-core` library.
//!
//! Trial `t` of a sub-experiment in block `b` always draws from
//! `RngStream::new(seed, (b << 32) | t)`, so results never depend on the
//! thread count or on scheduling.

use std::io::Write;
use std::time::Instant;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use kingman_core::edge_reveal::{fast_walk, run_erp};
use kingman_core::urrf::{delete_root_block_edges, sample_urrt};
use kingman_core::{run_kingman, sample_gnp, Result, RngStream, RootedForest};

pub mod suites;

/// Stream id of trial `trial` in sub-experiment `block`.
pub fn stream_id(block: u64, trial: u64) -> u64 {
    debug_assert!(trial < 1 << 32);
    block << 32 | trial
}

/// Runs `trials` independent work items in parallel and returns their
/// results in trial order.
pub fn run_trials<T, F>(seed: u64, block: u64, trials: u64, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RngStream, u64) -> Result<T> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| work(&mut RngStream::new(seed, stream_id(block, t)), t))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Coalescent run directly on a sampled `G(n, p)`.
    Direct,
    /// Faithful edge-reveal process.
    Erp,
    /// Edge-count walk; tree count only.
    Walk,
    /// Tree count from the walk, structure from a recursive tree with its
    /// first edges deleted.
    UrrtCoupling,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Erp => "erp",
            Method::Walk => "walk",
            Method::UrrtCoupling => "urrt-coupling",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulateConfig {
    pub method: Method,
    pub n: usize,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    /// Record wall time per trial. Off by default so output is canonical.
    pub timing: bool,
}

/// One simulated trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimRecord {
    pub trial: u64,
    pub n: usize,
    pub p: f64,
    pub method: Method,
    pub tree_count: usize,
    /// Forest height; absent for the walk, which has no structure.
    pub height: Option<usize>,
    /// Tree sizes in root order; absent for the walk.
    pub sizes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_us: Option<u64>,
}

fn simulate_one(cfg: &SimulateConfig, rng: &mut RngStream, trial: u64) -> Result<SimRecord> {
    let start = Instant::now();
    let (tree_count, height, sizes) = match cfg.method {
        Method::Direct => {
            let g = sample_gnp(cfg.n, cfg.p, rng)?;
            let run = run_kingman(&g, rng, false);
            let f = &run.final_forest;
            (run.tree_count(), Some(f.height()), Some(f.tree_sizes()))
        }
        Method::Erp => {
            let (state, trace) = run_erp(cfg.n, cfg.p, rng)?;
            let f = state.forest();
            (trace.tree_count(), Some(f.height()), Some(f.tree_sizes()))
        }
        Method::Walk => (fast_walk(cfg.n, cfg.p, rng)?.tree_count(), None, None),
        Method::UrrtCoupling => {
            let c = fast_walk(cfg.n, cfg.p, rng)?.tree_count();
            let f = delete_root_block_edges(&sample_urrt(cfg.n, rng)?, c)?;
            (c, Some(f.height()), Some(f.tree_sizes()))
        }
    };
    Ok(SimRecord {
        trial,
        n: cfg.n,
        p: cfg.p,
        method: cfg.method,
        tree_count,
        height,
        sizes,
        elapsed_us: cfg.timing.then(|| start.elapsed().as_micros() as u64),
    })
}

pub fn simulate(cfg: &SimulateConfig) -> Result<Vec<SimRecord>> {
    run_trials(cfg.seed, 0, cfg.trials, |rng, t| simulate_one(cfg, rng, t))
}

pub const CSV_HEADER: &str = "trial,n,p,method,tree_count,height,sizes,elapsed_us";

fn csv_line(r: &SimRecord) -> String {
    let opt = |v: Option<String>| v.unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{}",
        r.trial,
        r.n,
        r.p,
        r.method.name(),
        r.tree_count,
        opt(r.height.map(|h| h.to_string())),
        opt(r.sizes.as_ref().map(|s| s.iter().map(usize::to_string).collect::<Vec<_>>().join(";"))),
        opt(r.elapsed_us.map(|e| e.to_string())),
    )
}

pub fn write_records<W: Write>(records: &[SimRecord], format: Format, mut out: W) -> std::io::Result<()> {
    match format {
        Format::Jsonl => {
            for r in records {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
        }
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for r in records {
                writeln!(out, "{}", csv_line(r))?;
            }
        }
    }
    out.flush()
}

pub fn write_jsonl<W: Write, T: Serialize>(items: &[T], mut out: W) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
