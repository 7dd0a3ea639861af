use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::LabeledDataset;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::mixture::MixtureSpec;
use crate::model::PuDataset;

/// Two axis-aligned Gaussian classes with a class-prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPair {
    pub mean_pos: Vec<f64>,
    pub mean_neg: Vec<f64>,
    /// Per-coordinate standard deviations.
    pub std_pos: Vec<f64>,
    pub std_neg: Vec<f64>,
    pub prior: f64,
}

impl From<&MixtureSpec> for GaussianPair {
    fn from(s: &MixtureSpec) -> Self {
        Self {
            mean_pos: vec![s.mu_pos],
            mean_neg: vec![s.mu_neg],
            std_pos: vec![s.sigma_pos],
            std_neg: vec![s.sigma_neg],
            prior: s.true_prior,
        }
    }
}

impl GaussianPair {
    /// Isotropic pair with unit variance.
    pub fn isotropic(mean_pos: Vec<f64>, mean_neg: Vec<f64>, prior: f64) -> Self {
        let d = mean_pos.len();
        Self {
            mean_pos,
            mean_neg,
            std_pos: vec![1.0; d],
            std_neg: vec![1.0; d],
            prior,
        }
    }

    pub fn dim(&self) -> usize {
        self.mean_pos.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        for v in [&self.mean_neg, &self.std_pos, &self.std_neg] {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: v.len(),
                });
            }
        }
        if !self.std_pos.iter().chain(&self.std_neg).all(|s| *s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument("standard deviations must be > 0".into()));
        }
        if !self.mean_pos.iter().chain(&self.mean_neg).all(|m| m.is_finite()) {
            return Err(Error::InvalidArgument("means must be finite".into()));
        }
        if !(0.0..=1.0).contains(&self.prior) {
            return Err(Error::InvalidArgument("prior must lie in [0, 1]".into()));
        }
        Ok(())
    }

    fn draw_into(&self, rng: &mut ChaCha8Rng, positive: bool, out: &mut Vec<f64>) {
        let (mean, std) = if positive {
            (&self.mean_pos, &self.std_pos)
        } else {
            (&self.mean_neg, &self.std_neg)
        };
        for (m, s) in mean.iter().zip(std) {
            out.push(m + s * rng.sample::<f64, _>(StandardNormal));
        }
    }
}

/// Case-control PU sample: `n` positives from the positive class and `n_prime`
/// unlabeled points from the mixture.
pub fn sample_gaussian_pu(spec: &GaussianPair, n: usize, n_prime: usize, seed: u64) -> Result<PuDataset> {
    spec.validate()?;
    if n == 0 || n_prime == 0 {
        return Err(Error::InvalidArgument("sample sizes must be >= 1".into()));
    }
    let d = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos = Vec::with_capacity(n * d);
    for _ in 0..n {
        spec.draw_into(&mut rng, true, &mut pos);
    }
    let mut unl = Vec::with_capacity(n_prime * d);
    for _ in 0..n_prime {
        let y = rng.gen::<f64>() < spec.prior;
        spec.draw_into(&mut rng, y, &mut unl);
    }
    PuDataset::new(
        DenseMatrix::from_row_major(n, d, pos)?,
        DenseMatrix::from_row_major(n_prime, d, unl)?,
    )
}

/// Labeled draw from the mixture, e.g. for held-out evaluation.
pub fn sample_labeled(spec: &GaussianPair, m: usize, seed: u64) -> Result<LabeledDataset> {
    spec.validate()?;
    let d = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(m * d);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let y = rng.gen::<f64>() < spec.prior;
        spec.draw_into(&mut rng, y, &mut x);
        labels.push(if y { 1 } else { -1 });
    }
    LabeledDataset::new(DenseMatrix::from_row_major(m, d, x)?, labels)
}
