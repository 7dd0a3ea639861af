use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::LabeledDataset;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Projection onto the top principal directions of a sample covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaProjector {
    pub mean: Vec<f64>,
    /// Orthonormal directions, strongest first; each has length `d`.
    pub components: Vec<Vec<f64>>,
    /// Covariance eigenvalue of each component.
    pub explained_variance: Vec<f64>,
}

/// Fits a `k`-component projector. Each component is sign-fixed so that its
/// largest-magnitude entry is positive.
pub fn fit_pca(features: &DenseMatrix, k: usize) -> Result<PcaProjector> {
    let (n, d) = (features.nrows(), features.ncols());
    if k == 0 || k > d {
        return Err(Error::InvalidArgument(format!("cannot keep {k} components of {d}")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("PCA needs at least two rows".into()));
    }
    let mean = features.column_means();
    let mut cov = DMatrix::<f64>::zeros(d, d);
    let mut c = vec![0.0; d];
    for x in features.rows() {
        for j in 0..d {
            c[j] = x[j] - mean[j];
        }
        for i in 0..d {
            for j in i..d {
                cov[(i, j)] += c[i] * c[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = cov[(i, j)] / (n - 1) as f64;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut components = Vec::with_capacity(k);
    let mut explained_variance = Vec::with_capacity(k);
    for &j in order.iter().take(k) {
        let mut v: Vec<f64> = eig.eigenvectors.column(j).iter().copied().collect();
        let pivot = v.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        components.push(v);
        explained_variance.push(eig.eigenvalues[j].max(0.0));
    }
    Ok(PcaProjector {
        mean,
        components,
        explained_variance,
    })
}

impl PcaProjector {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    pub fn project(&self, features: &DenseMatrix) -> Result<DenseMatrix> {
        if features.ncols() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: features.ncols(),
            });
        }
        let k = self.output_dim();
        let mut out = DenseMatrix::zeros(features.nrows(), k);
        let mut c = vec![0.0; self.input_dim()];
        for (r, x) in features.rows().enumerate() {
            for (cj, (xj, mj)) in c.iter_mut().zip(x.iter().zip(&self.mean)) {
                *cj = xj - mj;
            }
            let dst = out.row_mut(r);
            for (o, comp) in dst.iter_mut().zip(&self.components) {
                *o = crate::matrix::dot(&c, comp);
            }
        }
        Ok(out)
    }

    pub fn project_dataset(&self, data: &LabeledDataset) -> Result<LabeledDataset> {
        Ok(data.with_features(self.project(data.features())?))
    }

    /// Maps projected coordinates back into the input space.
    pub fn reconstruct(&self, projected: &DenseMatrix) -> Result<DenseMatrix> {
        if projected.ncols() != self.output_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.output_dim(),
                got: projected.ncols(),
            });
        }
        let d = self.input_dim();
        let mut out = DenseMatrix::zeros(projected.nrows(), d);
        for (r, y) in projected.rows().enumerate() {
            let dst = out.row_mut(r);
            dst.copy_from_slice(&self.mean);
            for (coef, comp) in y.iter().zip(&self.components) {
                for (o, c) in dst.iter_mut().zip(comp) {
                    *o += coef * c;
                }
            }
        }
        Ok(out)
    }
}
