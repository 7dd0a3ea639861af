//! Dataset construction and ingestion.

mod case_control;
mod csv_io;
mod libsvm;
mod pca;
mod synthetic;

pub use case_control::{make_case_control, train_test_split, CaseControlDraw};
pub use csv_io::{read_feature_csv, read_labeled_csv, write_labeled_csv};
pub use libsvm::{load_libsvm, parse_libsvm, write_libsvm, LabelMapping};
pub use pca::{fit_pca, PcaProjector};
pub use synthetic::{sample_gaussian_pu, sample_labeled, GaussianPair};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Feature matrix with ±1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: DenseMatrix,
    labels: Vec<i8>,
}

impl LabeledDataset {
    pub fn new(features: DenseMatrix, labels: Vec<i8>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.nrows(),
                got: labels.len(),
            });
        }
        if let Some(bad) = labels.iter().find(|&&l| l != 1 && l != -1) {
            return Err(Error::InvalidArgument(format!("label {bad} is not +1 or -1")));
        }
        if !features.is_finite() {
            return Err(Error::NonFinite("features".into()));
        }
        Ok(Self { features, labels })
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    /// Swaps the roles of the two classes.
    pub fn flipped(&self) -> Self {
        Self {
            features: self.features.clone(),
            labels: self.labels.iter().map(|l| -l).collect(),
        }
    }

    pub fn class_indices(&self, label: i8) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == label).collect()
    }

    pub fn positive_fraction(&self) -> f64 {
        self.class_indices(1).len() as f64 / self.len().max(1) as f64
    }

    pub fn select(&self, idx: &[usize]) -> Self {
        Self {
            features: self.features.select_rows(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub(crate) fn with_features(&self, features: DenseMatrix) -> Self {
        Self {
            features,
            labels: self.labels.clone(),
        }
    }
}
