use std::path::{Path, PathBuf};
use std::process::ExitCode;

use altest_core::population::{iterate_population, pi_max, population_update, QuadratureGrid};
use altest_core::MixtureSpec;
use anyhow::{ensure, Result};
use clap::{Args, ValueEnum};

use crate::output;

#[derive(Clone, Copy, ValueEnum)]
pub enum Mode {
    /// One-step map prior_in -> prior_out over a list of priors.
    Sweep,
    /// Iterates from --start and records k, prior, gap, lemma2_rhs.
    Trace,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
pub struct PopulationArgs {
    #[arg(long, value_enum, default_value = "trace")]
    mode: Mode,
    #[arg(long, default_value_t = 2.0)]
    mu_pos: f64,
    #[arg(long, default_value_t = -2.0)]
    mu_neg: f64,
    /// Shared standard deviation of both components.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// True class-prior of the mixture.
    #[arg(long, default_value_t = 0.5)]
    pi: f64,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Number of Simpson nodes (odd).
    #[arg(long, default_value_t = 20001)]
    grid: usize,
    /// Integration domain as lo,hi.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-10.0, 10.0])]
    domain: Vec<f64>,

    /// Sweep priors; defaults to 0.05, 0.10, ..., 0.95.
    #[arg(long, value_delimiter = ',')]
    priors: Vec<f64>,
    /// Add a sweep row at pi_max.
    #[arg(long)]
    include_pi_max: bool,

    #[arg(long, default_value_t = 0.9)]
    start: f64,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    /// Stop the trace once a step is smaller than this.
    #[arg(long, default_value_t = 0.0)]
    tol: f64,

    #[arg(long, short)]
    output: Option<PathBuf>,
}

pub fn run(a: PopulationArgs, dir: Option<&Path>) -> Result<ExitCode> {
    ensure!(a.domain.len() == 2, "--domain takes lo,hi");
    let spec = MixtureSpec {
        mu_pos: a.mu_pos,
        mu_neg: a.mu_neg,
        sigma_pos: a.sigma,
        sigma_neg: a.sigma,
        true_prior: a.pi,
        epsilon: a.epsilon,
        domain: (a.domain[0], a.domain[1]),
    };
    spec.validate()?;
    let grid = QuadratureGrid::simpson(spec.domain.0, spec.domain.1, a.grid)?;

    let mut rows: Vec<Vec<String>> = Vec::new();
    let header: &[&str] = match a.mode {
        Mode::Sweep => {
            let mut priors = if a.priors.is_empty() {
                (1..20).map(|i| i as f64 * 0.05).collect()
            } else {
                a.priors.clone()
            };
            if a.include_pi_max {
                priors.push(pi_max(&spec, &grid)?.value);
            }
            for p in priors {
                let next = population_update(&spec, p, &grid)?;
                rows.push(vec![p.to_string(), next.to_string()]);
            }
            &["prior_in", "prior_out"]
        }
        Mode::Trace => {
            for s in iterate_population(&spec, a.start, &grid, a.iters, a.tol)? {
                rows.push(vec![
                    s.k.to_string(),
                    s.prior.to_string(),
                    s.gap.map(|g| g.to_string()).unwrap_or_default(),
                    s.lemma2_rhs.to_string(),
                ]);
            }
            &["k", "prior", "gap", "lemma2_rhs"]
        }
    };

    let default_name = match a.mode {
        Mode::Sweep => "population_sweep.csv",
        Mode::Trace => "population_trace.csv",
    };
    let dest = output::resolve(a.output.as_deref(), dir, default_name);
    let mut w = csv::Writer::from_writer(output::open(dest.as_deref())?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}
