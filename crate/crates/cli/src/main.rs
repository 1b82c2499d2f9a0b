use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kingman_cli::suites::{edge_addition, run_suite, Suite, VerifyConfig};
use kingman_cli::{simulate, write_jsonl, write_records, Format, Method, SimulateConfig};
use kingman_core::oracle::exact_cnp_distribution;

#[derive(Parser)]
#[command(name = "kingman", version, about = "Kingman coalescent on random graphs: simulation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed; trial i draws from stream i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (results do not depend on this).
    #[arg(long, env = "KINGMAN_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run independent trials and emit one record per trial.
    Simulate {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
        /// Include per-trial wall time (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite; exits 0 iff every report passes.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Print the exact law of the tree count of G(n, p) for n <= 6.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
    },
    /// Exploratory experiments with no pass/fail meaning.
    Explore {
        #[command(subcommand)]
        experiment: Experiment,
    },
}

#[derive(Subcommand)]
enum Experiment {
    /// Exact scan of whether adding one edge can raise the mean tree count.
    EdgeAddition {
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
}

fn output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn with_pool<T: Send>(threads: Option<u64>, work: impl FnOnce() -> T + Send) -> Result<T, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t as usize);
    }
    let pool = builder.build().map_err(|e| e.to_string())?;
    Ok(pool.install(work))
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Simulate {
            method,
            n,
            p,
            trials,
            format,
            timing,
            common,
        } => {
            let cfg = SimulateConfig {
                method,
                n,
                p,
                trials,
                seed: common.seed,
                timing,
            };
            let records = with_pool(common.threads, || simulate(&cfg))?.map_err(|e| e.to_string())?;
            write_records(&records, format, output(&common.output).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            suite,
            n,
            p,
            trials,
            common,
        } => {
            let cfg = VerifyConfig {
                n,
                p,
                trials,
                seed: common.seed,
            };
            let reports = with_pool(common.threads, || run_suite(suite, &cfg))?.map_err(|e| e.to_string())?;
            write_jsonl(&reports, output(&common.output).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            Ok(if reports.iter().all(|r| r.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Oracle { n, p } => {
            let d = exact_cnp_distribution(n, p).map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string(&d).map_err(|e| e.to_string())?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Explore { experiment } => match experiment {
            Experiment::EdgeAddition { n } => {
                let report = edge_addition(n).map_err(|e| e.to_string())?;
                println!("{}", serde_json::to_string(&report).map_err(|e| e.to_string())?);
                Ok(ExitCode::SUCCESS)
            }
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
