//! Datasets, the linear score model and its sigmoid link.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dot, DenseMatrix};

/// A positive sample and an unlabeled sample sharing the same feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct PuDataset {
    positives: DenseMatrix,
    unlabeled: DenseMatrix,
}

impl PuDataset {
    pub fn new(positives: DenseMatrix, unlabeled: DenseMatrix) -> Result<Self> {
        if positives.nrows() == 0 || unlabeled.nrows() == 0 {
            return Err(Error::InvalidArgument(
                "positive and unlabeled sets must be non-empty".into(),
            ));
        }
        if positives.ncols() == 0 {
            return Err(Error::InvalidArgument("feature dimension must be positive".into()));
        }
        if positives.ncols() != unlabeled.ncols() {
            return Err(Error::DimensionMismatch {
                expected: positives.ncols(),
                got: unlabeled.ncols(),
            });
        }
        if !positives.is_finite() || !unlabeled.is_finite() {
            return Err(Error::NonFinite("dataset contains NaN or infinite entries".into()));
        }
        Ok(Self {
            positives,
            unlabeled,
        })
    }

    pub fn positives(&self) -> &DenseMatrix {
        &self.positives
    }

    pub fn unlabeled(&self) -> &DenseMatrix {
        &self.unlabeled
    }

    pub fn dim(&self) -> usize {
        self.positives.ncols()
    }
}

/// Linear score `g(x) = θᵀz` with `z = (1, x)` when a bias is used, else `z = x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearScoreModel {
    weights: Vec<f64>,
    with_bias: bool,
}

/// The two linear model families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Linear model with a bias term.
    AltEst1,
    /// Linear model through the origin.
    AltEst2,
}

impl ModelKind {
    pub fn with_bias(self) -> bool {
        matches!(self, ModelKind::AltEst1)
    }
}

impl LinearScoreModel {
    pub fn new(weights: Vec<f64>, with_bias: bool) -> Result<Self> {
        if with_bias && weights.is_empty() {
            return Err(Error::InvalidArgument("bias model needs at least one weight".into()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("model weights".into()));
        }
        Ok(Self { weights, with_bias })
    }

    pub fn zeros(dim: usize, with_bias: bool) -> Self {
        Self {
            weights: vec![0.0; dim + usize::from(with_bias)],
            with_bias,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn with_bias(&self) -> bool {
        self.with_bias
    }

    /// Feature dimension `d` the model expects.
    pub fn input_dim(&self) -> usize {
        self.weights.len() - usize::from(self.with_bias)
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.input_dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: dim,
            });
        }
        Ok(())
    }

    /// `g(x)` without a dimension check.
    #[inline]
    pub(crate) fn score_unchecked(&self, x: &[f64]) -> f64 {
        if self.with_bias {
            self.weights[0] + dot(&self.weights[1..], x)
        } else {
            dot(&self.weights, x)
        }
    }

    /// Linear score `g(x)`.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.score_unchecked(x))
    }

    /// `f(x) = sigmoid(g(x))`.
    pub fn prob(&self, x: &[f64]) -> Result<f64> {
        self.score(x).map(sigmoid)
    }

    /// `h(x) = sign(f(x) - 0.5)`, with ties going to the negative class.
    pub fn classify(&self, x: &[f64]) -> Result<i8> {
        Ok(if self.prob(x)? > 0.5 { 1 } else { -1 })
    }

    /// Writes the augmented feature vector `z` into `out`.
    #[inline]
    pub(crate) fn augment_into(&self, x: &[f64], out: &mut [f64]) {
        if self.with_bias {
            out[0] = 1.0;
            out[1..].copy_from_slice(x);
        } else {
            out.copy_from_slice(x);
        }
    }
}

/// Logistic sigmoid, split on the sign of `g` so `exp` never overflows.
#[inline]
pub fn sigmoid(g: f64) -> f64 {
    if g >= 0.0 {
        1.0 / (1.0 + (-g).exp())
    } else {
        let e = g.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(g))`.
#[inline]
pub fn softplus(g: f64) -> f64 {
    g.max(0.0) + (-g.abs()).exp().ln_1p()
}
