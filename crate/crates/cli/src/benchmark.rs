use std::path::{Path, PathBuf};
use std::process::ExitCode;

use altest_core::bench::{run_benchmark, write_benchmark_csv, BenchmarkConfig};
use anyhow::{Context, Result};
use clap::Args;

use crate::output;

#[derive(Args)]
pub struct BenchmarkArgs {
    /// TOML benchmark config.
    config: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

pub fn run(a: BenchmarkArgs, dir: Option<&Path>) -> Result<ExitCode> {
    let mut cfg = BenchmarkConfig::load(&a.config)
        .with_context(|| format!("loading {}", a.config.display()))?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let jobs = a
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let outcome = run_benchmark(&cfg, jobs)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let dest = output::resolve(a.output.as_deref(), dir, "benchmark.csv");
    write_benchmark_csv(output::open(dest.as_deref())?, &outcome)?;
    Ok(ExitCode::SUCCESS)
}
