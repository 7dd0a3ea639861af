use std::path::{Path, PathBuf};
use std::process::ExitCode;

use altest_core::data::{sample_labeled, write_labeled_csv, GaussianPair};
use altest_core::bench::task_seed;
use anyhow::{ensure, Result};
use clap::Args;

use crate::output;

#[derive(Args)]
#[command(allow_negative_numbers = true)]
pub struct GenerateArgs {
    /// Positive-class mean, one value per feature.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [2.0])]
    mean_pos: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-2.0])]
    mean_neg: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Positive fraction of the unlabeled and test sets.
    #[arg(long, default_value_t = 0.5)]
    pi: f64,
    #[arg(long, default_value_t = 100)]
    n_pos: usize,
    #[arg(long, default_value_t = 10000)]
    n_unlabeled: usize,
    #[arg(long, default_value_t = 2000)]
    n_test: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving positive.csv, unlabeled.csv and test.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(a: GenerateArgs, dir: Option<&Path>) -> Result<ExitCode> {
    ensure!(a.mean_pos.len() == a.mean_neg.len(), "--mean-pos and --mean-neg differ in length");
    let d = a.mean_pos.len();
    let spec = |prior| GaussianPair {
        mean_pos: a.mean_pos.clone(),
        mean_neg: a.mean_neg.clone(),
        std_pos: vec![a.sigma; d],
        std_neg: vec![a.sigma; d],
        prior,
    };
    let target = match (a.out.as_deref(), dir) {
        (Some(p), Some(d)) if p.is_relative() => d.join(p),
        (Some(p), _) => p.to_path_buf(),
        (None, Some(d)) => d.to_path_buf(),
        (None, None) => PathBuf::from("."),
    };
    let sets = [
        ("positive.csv", sample_labeled(&spec(1.0), a.n_pos, task_seed(a.seed, &[0]))?),
        ("unlabeled.csv", sample_labeled(&spec(a.pi), a.n_unlabeled, task_seed(a.seed, &[1]))?),
        ("test.csv", sample_labeled(&spec(a.pi), a.n_test, task_seed(a.seed, &[2]))?),
    ];
    for (name, data) in &sets {
        write_labeled_csv(output::open(Some(&target.join(name)))?, data)?;
    }
    Ok(ExitCode::SUCCESS)
}
