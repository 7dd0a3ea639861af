use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use altest_core::data::{
    fit_pca, load_libsvm, make_case_control, read_feature_csv, read_labeled_csv, train_test_split,
    LabelMapping, LabeledDataset,
};
use altest_core::eval::error_rate;
use altest_core::{
    minimize_risk, run_alternate, AlternateConfig, Error, InitWeights, LinearScoreModel, ModelKind,
    OptimizerConfig, PuDataset, RestartEvent,
};
use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::output;

/// Exit code for estimation failures reported as JSON.
const ESTIMATION_FAILED: u8 = 3;

#[derive(Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Altest1,
    Altest2,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Altest1 => ModelKind::AltEst1,
            ModelArg::Altest2 => ModelKind::AltEst2,
        }
    }
}

#[derive(Args)]
pub struct DataArgs {
    /// CSV of labeled positives (header row, optional label column).
    #[arg(long, requires = "unlabeled", conflicts_with = "libsvm")]
    positive: Option<PathBuf>,
    /// CSV of unlabeled rows; a label column, if present, is ignored.
    #[arg(long, requires = "positive")]
    unlabeled: Option<PathBuf>,

    /// LIBSVM pool to draw a case-control PU pair from.
    #[arg(long, requires_all = ["n_pos", "n_unlabeled", "prior"])]
    libsvm: Option<PathBuf>,
    /// Raw labels mapped to the positive class (default: binary labels).
    #[arg(long, value_delimiter = ',', requires = "libsvm")]
    positive_labels: Vec<f64>,
    /// Raw labels mapped to the negative class (default: all others).
    #[arg(long, value_delimiter = ',', requires = "positive_labels")]
    negative_labels: Vec<f64>,
    #[arg(long, requires = "libsvm")]
    n_pos: Option<usize>,
    #[arg(long, requires = "libsvm")]
    n_unlabeled: Option<usize>,
    /// Positive fraction of the drawn unlabeled set.
    #[arg(long, requires = "libsvm")]
    prior: Option<f64>,
    /// Swap the classes before drawing.
    #[arg(long, requires = "libsvm")]
    flip: bool,
    /// Project onto this many principal components fitted on the pool.
    #[arg(long, requires = "libsvm")]
    pca: Option<usize>,
    /// Hold out this many pool rows as a test set.
    #[arg(long, requires = "libsvm", conflicts_with = "test_set")]
    test_size: Option<usize>,

    /// Labeled CSV for the test error rate.
    #[arg(long)]
    test_set: Option<PathBuf>,
}

#[derive(Args)]
pub struct EstimatorArgs {
    #[arg(long, value_enum, default_value = "altest1")]
    model: ModelArg,
    #[arg(long, default_value_t = 0.9)]
    initial_prior: f64,
    /// Restart threshold on the updated prior.
    #[arg(long, default_value_t = 0.9)]
    delta: f64,
    /// Decrement applied to the initial prior on restart.
    #[arg(long, default_value_t = 0.01)]
    xi: f64,
    #[arg(long, default_value_t = 150)]
    max_iters: usize,
    /// Stop once the prior moves less than this; 0 runs all iterations.
    #[arg(long, default_value_t = 1e-4)]
    prior_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    ridge: f64,
    #[arg(long, default_value_t = 1e-6)]
    grad_tol: f64,
    #[arg(long, default_value_t = 1000)]
    max_inner_iters: usize,
    /// Start every inner minimization from zero weights.
    #[arg(long)]
    cold_start: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted and no output directory is set.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl EstimatorArgs {
    fn config(&self) -> AlternateConfig {
        AlternateConfig {
            initial_prior: self.initial_prior,
            delta: self.delta,
            xi: self.xi,
            max_outer_iters: self.max_iters,
            prior_tol: self.prior_tol,
            inner_opt: OptimizerConfig {
                max_inner_iters: self.max_inner_iters,
                grad_tol: self.grad_tol,
                ridge: self.ridge,
                init_weights: if self.cold_start {
                    InitWeights::Zeros
                } else {
                    InitWeights::WarmStart
                },
            },
            seed: self.seed,
        }
    }
}

#[derive(Args)]
pub struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    est: EstimatorArgs,
    /// Skip alternation and minimize the risk at this prior.
    #[arg(long)]
    fixed_prior: Option<f64>,
}

#[derive(Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    est: EstimatorArgs,
}

struct Loaded {
    pu: PuDataset,
    test: Option<LabeledDataset>,
}

fn load(d: &DataArgs, seed: u64) -> Result<Loaded> {
    let mut test = match &d.test_set {
        Some(p) => {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            Some(read_labeled_csv(f).with_context(|| format!("reading {}", p.display()))?)
        }
        None => None,
    };
    let pu = if let (Some(p), Some(u)) = (&d.positive, &d.unlabeled) {
        let read = |path: &Path| -> Result<_> {
            let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            read_feature_csv(f).with_context(|| format!("reading {}", path.display()))
        };
        PuDataset::new(read(p)?, read(u)?)?
    } else if let Some(path) = &d.libsvm {
        let mapping = if d.positive_labels.is_empty() {
            LabelMapping::Binary
        } else {
            LabelMapping::Split {
                positive: d.positive_labels.clone(),
                negative: (!d.negative_labels.is_empty()).then(|| d.negative_labels.clone()),
            }
        };
        let all = load_libsvm(path, &mapping).with_context(|| format!("reading {}", path.display()))?;
        let mut pool = match d.test_size {
            Some(n) => {
                let (pool, held) = train_test_split(&all, n, seed)?;
                test = Some(held);
                pool
            }
            None => all,
        };
        if let Some(k) = d.pca {
            let proj = fit_pca(pool.features(), k)?;
            pool = proj.project_dataset(&pool)?;
            test = test.map(|t| proj.project_dataset(&t)).transpose()?;
        }
        if d.flip {
            test = test.map(|t| t.flipped());
        }
        let (Some(n_pos), Some(n_unl), Some(prior)) = (d.n_pos, d.n_unlabeled, d.prior) else {
            unreachable!("clap enforces the case-control flags")
        };
        make_case_control(&pool, n_pos, n_unl, prior, d.flip, seed)?.dataset
    } else {
        bail!("supply --positive and --unlabeled, or --libsvm with case-control flags");
    };
    Ok(Loaded { pu, test })
}

#[derive(Serialize)]
struct ConfigEcho {
    model: ModelKind,
    fixed_prior: Option<f64>,
    alternate: AlternateConfig,
}

#[derive(Serialize)]
struct TrainReport {
    estimated_prior: f64,
    trajectory: Vec<f64>,
    restarts: Vec<RestartEvent>,
    converged: bool,
    weights: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    test_error: Option<f64>,
    config: ConfigEcho,
    seed: u64,
}

#[derive(Serialize)]
struct EstimateReport {
    estimated_prior: f64,
    iterations: usize,
    restarts: Vec<RestartEvent>,
    converged: bool,
    seed: u64,
}

#[derive(Serialize)]
struct ErrorBody {
    kind: &'static str,
    message: String,
    #[serde(flatten)]
    detail: Option<serde_json::Value>,
}

#[derive(Serialize)]
struct ErrorReport {
    error: ErrorBody,
    seed: u64,
}

fn error_report(e: &Error, seed: u64) -> ErrorReport {
    let (kind, detail) = match e {
        Error::InitialPriorExhausted {
            restarts,
            iteration,
            next_initial_prior,
            xi,
        } => (
            "initial_prior_exhausted",
            Some(serde_json::json!({
                "restarts": restarts,
                "iteration": iteration,
                "next_initial_prior": next_initial_prior,
                "xi": xi,
            })),
        ),
        Error::NonFinite(_) | Error::NonFiniteIterate { .. } => ("non_finite", None),
        Error::InvalidArgument(_) => ("invalid_argument", None),
        Error::DimensionMismatch { .. } => ("dimension_mismatch", None),
        _ => ("estimation_failed", None),
    };
    ErrorReport {
        error: ErrorBody {
            kind,
            message: e.to_string(),
            detail,
        },
        seed,
    }
}

fn fail(e: &Error, seed: u64, dest: Option<&Path>) -> Result<ExitCode> {
    output::write_json(dest, &error_report(e, seed))?;
    eprintln!("error: {e}");
    Ok(ExitCode::from(ESTIMATION_FAILED))
}

pub fn run_train(a: TrainArgs, dir: Option<&Path>) -> Result<ExitCode> {
    let dest = output::resolve(a.est.output.as_deref(), dir, "train.json");
    let cfg = a.est.config();
    let kind = ModelKind::from(a.est.model);
    let seed = a.est.seed;
    let loaded = load(&a.data, seed)?;

    let fitted = match a.fixed_prior {
        Some(p) => cfg.inner_opt.validate().and_then(|_| {
            let init = LinearScoreModel::zeros(loaded.pu.dim(), kind.with_bias());
            minimize_risk(&loaded.pu, p, &cfg.inner_opt, &init).map(|out| (vec![p], Vec::new(), out.converged, out.model))
        }),
        None => run_alternate(&loaded.pu, &cfg, kind.with_bias())
            .map(|t| (t.priors, t.restarts, t.converged, t.final_model)),
    };
    let (trajectory, restarts, converged, model) = match fitted {
        Ok(v) => v,
        Err(e) => return fail(&e, seed, dest.as_deref()),
    };
    let test_error = loaded.test.as_ref().map(|t| error_rate(&model, t)).transpose()?;
    let report = TrainReport {
        estimated_prior: *trajectory.last().expect("non-empty trajectory"),
        trajectory,
        restarts,
        converged,
        weights: model.weights().to_vec(),
        test_error,
        config: ConfigEcho {
            model: kind,
            fixed_prior: a.fixed_prior,
            alternate: cfg,
        },
        seed,
    };
    output::write_json(dest.as_deref(), &report)?;
    Ok(ExitCode::SUCCESS)
}

pub fn run_estimate(a: EstimateArgs, dir: Option<&Path>) -> Result<ExitCode> {
    let dest = output::resolve(a.est.output.as_deref(), dir, "estimate.json");
    let cfg = a.est.config();
    let seed = a.est.seed;
    let loaded = load(&a.data, seed)?;
    let traj = match run_alternate(&loaded.pu, &cfg, ModelKind::from(a.est.model).with_bias()) {
        Ok(t) => t,
        Err(e) => return fail(&e, seed, dest.as_deref()),
    };
    let report = EstimateReport {
        estimated_prior: traj.estimated_prior(),
        iterations: traj.outer_iterations(),
        restarts: traj.restarts,
        converged: traj.converged,
        seed,
    };
    output::write_json(dest.as_deref(), &report)?;
    Ok(ExitCode::SUCCESS)
}
