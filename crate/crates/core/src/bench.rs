//! Seeded benchmark harness: case-control PU pairs drawn from labeled pools
//! across a grid of priors, unlabeled-set sizes and repetitions.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alternate::run_alternate;
use crate::config::AlternateConfig;
use crate::data::{
    fit_pca, load_libsvm, make_case_control, sample_labeled, train_test_split, GaussianPair,
    LabelMapping, LabeledDataset,
};
use crate::error::{Error, Result};
use crate::eval::{error_rate, mean_std};
use crate::model::ModelKind;

/// Where a benchmark pool comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DatasetSource {
    /// Isotropic Gaussian classes; pool and test set are sampled fresh.
    Gaussian {
        mean_pos: Vec<f64>,
        mean_neg: Vec<f64>,
        #[serde(default = "one")]
        std: f64,
        pool_size: usize,
        #[serde(default = "half")]
        pool_prior: f64,
    },
    /// LIBSVM file with a class split and optional PCA projection.
    Libsvm {
        path: PathBuf,
        labels: LabelMapping,
        #[serde(default)]
        pca: Option<usize>,
    },
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub name: String,
    #[serde(flatten)]
    pub source: DatasetSource,
}

/// Overrides for the alternating estimator; unset fields keep the defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlternateOverrides {
    pub initial_prior: Option<f64>,
    pub delta: Option<f64>,
    pub xi: Option<f64>,
    pub max_outer_iters: Option<usize>,
    pub prior_tol: Option<f64>,
    pub ridge: Option<f64>,
    pub grad_tol: Option<f64>,
    pub max_inner_iters: Option<usize>,
}

impl AlternateOverrides {
    pub fn apply(&self, mut cfg: AlternateConfig) -> AlternateConfig {
        if let Some(v) = self.initial_prior {
            cfg.initial_prior = v;
        }
        if let Some(v) = self.delta {
            cfg.delta = v;
        }
        if let Some(v) = self.xi {
            cfg.xi = v;
        }
        if let Some(v) = self.max_outer_iters {
            cfg.max_outer_iters = v;
        }
        if let Some(v) = self.prior_tol {
            cfg.prior_tol = v;
        }
        if let Some(v) = self.ridge {
            cfg.inner_opt.ridge = v;
        }
        if let Some(v) = self.grad_tol {
            cfg.inner_opt.grad_tol = v;
        }
        if let Some(v) = self.max_inner_iters {
            cfg.inner_opt.max_inner_iters = v;
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub datasets: Vec<DatasetConfig>,
    #[serde(default = "default_priors")]
    pub priors: Vec<f64>,
    #[serde(default = "default_n_unlabeled")]
    pub n_unlabeled: Vec<usize>,
    #[serde(default = "default_n_pos")]
    pub n_pos: usize,
    #[serde(default = "default_reps")]
    pub repetitions: usize,
    /// Run each setting as given and/or with the classes swapped.
    #[serde(default = "default_flip")]
    pub flip: Vec<bool>,
    #[serde(default = "default_test_size")]
    pub test_size: usize,
    #[serde(default = "default_model")]
    pub model: ModelKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub alternate: AlternateOverrides,
}

fn default_priors() -> Vec<f64> {
    vec![0.2, 0.4, 0.6, 0.8]
}
fn default_n_unlabeled() -> Vec<usize> {
    vec![400, 800, 1600, 3200]
}
fn default_n_pos() -> usize {
    400
}
fn default_reps() -> usize {
    5
}
fn default_flip() -> Vec<bool> {
    vec![false, true]
}
fn default_test_size() -> usize {
    1000
}
fn default_model() -> ModelKind {
    ModelKind::AltEst2
}

impl BenchmarkConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("benchmark config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_toml(&text)?;
        // relative dataset paths resolve against the config file
        if let Some(dir) = path.parent() {
            for d in &mut cfg.datasets {
                if let DatasetSource::Libsvm { path, .. } = &mut d.source {
                    if path.is_relative() {
                        *path = dir.join(&*path);
                    }
                }
            }
        }
        Ok(cfg)
    }

    pub fn alternate_config(&self) -> AlternateConfig {
        self.alternate.apply(AlternateConfig {
            seed: self.seed,
            ..AlternateConfig::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.datasets.is_empty() {
            return bad("no datasets listed".into());
        }
        if self.priors.is_empty() || self.n_unlabeled.is_empty() || self.flip.is_empty() {
            return bad("priors, n_unlabeled and flip must be non-empty".into());
        }
        if let Some(p) = self.priors.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return bad(format!("prior {p} outside [0, 1]"));
        }
        if self.repetitions == 0 || self.n_pos == 0 || self.n_unlabeled.contains(&0) {
            return bad("repetitions and set sizes must be >= 1".into());
        }
        let mut names = std::collections::HashSet::new();
        for d in &self.datasets {
            if !names.insert(&d.name) {
                return bad(format!("duplicate dataset name {:?}", d.name));
            }
            if let DatasetSource::Gaussian {
                mean_pos,
                mean_neg,
                std,
                pool_prior,
                ..
            } = &d.source
            {
                GaussianPair {
                    mean_pos: mean_pos.clone(),
                    mean_neg: mean_neg.clone(),
                    std_pos: vec![*std; mean_pos.len()],
                    std_neg: vec![*std; mean_pos.len()],
                    prior: *pool_prior,
                }
                .validate()?;
            }
        }
        self.alternate_config().validate()
    }
}

/// One benchmark repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub dataset: String,
    pub flip: bool,
    pub prior: f64,
    pub n_unlabeled: usize,
    pub rep: usize,
    pub estimated_prior: f64,
    pub abs_error: f64,
    pub test_error: f64,
    pub wall_time: f64,
}

/// Mean and standard deviation over the repetitions of one setting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchAggregate {
    pub dataset: String,
    pub flip: bool,
    pub prior: f64,
    pub n_unlabeled: usize,
    pub count: usize,
    pub mean: [f64; 4],
    pub std: [f64; 4],
}

#[derive(Debug, Clone, Default)]
pub struct BenchOutcome {
    pub records: Vec<BenchRecord>,
    pub aggregates: Vec<BenchAggregate>,
    pub warnings: Vec<String>,
}

struct Prepared {
    name: String,
    pool: LabeledDataset,
    test: LabeledDataset,
}

/// SplitMix64 finalizer, used to derive independent per-task seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn task_seed(base: u64, keys: &[u64]) -> u64 {
    keys.iter().fold(mix(base), |acc, k| mix(acc ^ mix(*k)))
}

fn prepare(d: &DatasetConfig, cfg: &BenchmarkConfig, index: u64) -> Result<Prepared> {
    let (pool, test) = match &d.source {
        DatasetSource::Gaussian {
            mean_pos,
            mean_neg,
            std,
            pool_size,
            pool_prior,
        } => {
            let spec = GaussianPair {
                mean_pos: mean_pos.clone(),
                mean_neg: mean_neg.clone(),
                std_pos: vec![*std; mean_pos.len()],
                std_neg: vec![*std; mean_pos.len()],
                prior: *pool_prior,
            };
            let pool = sample_labeled(&spec, *pool_size, task_seed(cfg.seed, &[index, 0]))?;
            let test = sample_labeled(&spec, cfg.test_size, task_seed(cfg.seed, &[index, 1]))?;
            (pool, test)
        }
        DatasetSource::Libsvm { path, labels, pca } => {
            let all = load_libsvm(path, labels)?;
            let (pool, test) = train_test_split(&all, cfg.test_size, task_seed(cfg.seed, &[index, 2]))?;
            match pca {
                Some(k) => {
                    let proj = fit_pca(pool.features(), *k)?;
                    (proj.project_dataset(&pool)?, proj.project_dataset(&test)?)
                }
                None => (pool, test),
            }
        }
    };
    Ok(Prepared {
        name: d.name.clone(),
        pool,
        test,
    })
}

struct Task {
    dataset: usize,
    flip: bool,
    prior: f64,
    n_unlabeled: usize,
    rep: usize,
    seed: u64,
}

fn run_task(p: &Prepared, t: &Task, cfg: &BenchmarkConfig, alt: &AlternateConfig) -> Result<BenchRecord> {
    let start = Instant::now();
    let draw = make_case_control(&p.pool, cfg.n_pos, t.n_unlabeled, t.prior, t.flip, t.seed)?;
    let traj = run_alternate(&draw.dataset, alt, cfg.model.with_bias())?;
    let test = if t.flip { p.test.flipped() } else { p.test.clone() };
    let test_error = error_rate(&traj.final_model, &test)?;
    let estimated = traj.estimated_prior();
    Ok(BenchRecord {
        dataset: p.name.clone(),
        flip: t.flip,
        prior: t.prior,
        n_unlabeled: t.n_unlabeled,
        rep: t.rep,
        estimated_prior: estimated,
        abs_error: (estimated - t.prior).abs(),
        test_error,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Runs every (dataset, flip, prior, n_unlabeled, rep) task on `jobs` threads.
///
/// Datasets that fail to load and tasks that fail are reported as warnings
/// and skipped. Record order is independent of `jobs`.
pub fn run_benchmark(cfg: &BenchmarkConfig, jobs: usize) -> Result<BenchOutcome> {
    cfg.validate()?;
    let alt = cfg.alternate_config();
    let mut warnings = Vec::new();
    let mut prepared = Vec::new();
    for (i, d) in cfg.datasets.iter().enumerate() {
        match prepare(d, cfg, i as u64) {
            Ok(p) => prepared.push((i, p)),
            Err(e) => {
                let source = match &d.source {
                    DatasetSource::Libsvm { path, .. } => format!(" ({})", path.display()),
                    DatasetSource::Gaussian { .. } => String::new(),
                };
                warnings.push(format!("skipping dataset {:?}{source}: {e}", d.name));
            }
        }
    }

    let mut tasks = Vec::new();
    for (slot, (i, _)) in prepared.iter().enumerate() {
        for &flip in &cfg.flip {
            for (pi_idx, &prior) in cfg.priors.iter().enumerate() {
                for &n_unlabeled in &cfg.n_unlabeled {
                    for rep in 0..cfg.repetitions {
                        let keys = [*i as u64, flip as u64, pi_idx as u64, n_unlabeled as u64, rep as u64];
                        tasks.push(Task {
                            dataset: slot,
                            flip,
                            prior,
                            n_unlabeled,
                            rep,
                            seed: task_seed(cfg.seed, &keys),
                        });
                    }
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let results: Vec<Result<BenchRecord>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| run_task(&prepared[t.dataset].1, t, cfg, &alt))
            .collect()
    });

    let mut records = Vec::with_capacity(results.len());
    for (t, r) in tasks.iter().zip(results) {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => warnings.push(format!(
                "{} flip={} prior={} n_unlabeled={} rep={}: {e}",
                prepared[t.dataset].1.name, t.flip, t.prior, t.n_unlabeled, t.rep
            )),
        }
    }
    let aggregates = aggregate(&records);
    Ok(BenchOutcome {
        records,
        aggregates,
        warnings,
    })
}

/// Groups consecutive records of the same setting.
pub fn aggregate(records: &[BenchRecord]) -> Vec<BenchAggregate> {
    let key = |r: &BenchRecord| (r.dataset.clone(), r.flip, r.prior.to_bits(), r.n_unlabeled);
    let mut out = Vec::new();
    let mut start = 0;
    while start < records.len() {
        let k = key(&records[start]);
        let end = records[start..]
            .iter()
            .position(|r| key(r) != k)
            .map_or(records.len(), |p| start + p);
        let group = &records[start..end];
        let column = |f: fn(&BenchRecord) -> f64| mean_std(&group.iter().map(f).collect::<Vec<_>>());
        let cols = [
            column(|r| r.estimated_prior),
            column(|r| r.abs_error),
            column(|r| r.test_error),
            column(|r| r.wall_time),
        ];
        let r0 = &records[start];
        out.push(BenchAggregate {
            dataset: r0.dataset.clone(),
            flip: r0.flip,
            prior: r0.prior,
            n_unlabeled: r0.n_unlabeled,
            count: group.len(),
            mean: cols.map(|c| c.0),
            std: cols.map(|c| c.1),
        });
        start = end;
    }
    out
}

pub const CSV_HEADER: [&str; 9] = [
    "dataset",
    "flip",
    "prior",
    "n_unlabeled",
    "rep",
    "estimated_prior",
    "abs_error",
    "test_error",
    "wall_time",
];

/// Writes data rows followed by `rep = mean` and `rep = std` rows per setting.
pub fn write_benchmark_csv<W: Write>(w: W, outcome: &BenchOutcome) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in &outcome.records {
        out.write_record([
            r.dataset.clone(),
            r.flip.to_string(),
            r.prior.to_string(),
            r.n_unlabeled.to_string(),
            r.rep.to_string(),
            r.estimated_prior.to_string(),
            r.abs_error.to_string(),
            r.test_error.to_string(),
            r.wall_time.to_string(),
        ])?;
    }
    for a in &outcome.aggregates {
        for (label, vals) in [("mean", &a.mean), ("std", &a.std)] {
            let mut rec = vec![
                a.dataset.clone(),
                a.flip.to_string(),
                a.prior.to_string(),
                a.n_unlabeled.to_string(),
                label.to_string(),
            ];
            rec.extend(vals.iter().map(|v| v.to_string()));
            out.write_record(&rec)?;
        }
    }
    out.flush()?;
    Ok(())
}
