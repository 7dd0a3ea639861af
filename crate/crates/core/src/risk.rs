//! The κ-parameterized empirical PU risk under the logarithmic loss.
//!
//! With `f = sigmoid(g)` the risk
//! `-κ·mean_P[log f] + κ·mean_P[log(1-f)] - mean_U[log(1-f)]`
//! collapses to `-κ·mean_P[g] + mean_U[softplus(g)]` because
//! `log f - log(1-f) = g`. Both forms are provided; they must agree.

use crate::error::{Error, Result};
use crate::model::{sigmoid, softplus, LinearScoreModel, PuDataset};

/// Risk value together with its gradient in θ.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskValue {
    pub value: f64,
    pub grad: Vec<f64>,
}

fn check(data: &PuDataset, model: &LinearScoreModel, kappa: f64) -> Result<()> {
    model.check_dim(data.dim())?;
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::InvalidArgument(format!("kappa {kappa} outside [0, 1]")));
    }
    Ok(())
}

/// Three-term form, evaluated literally with `log f = -softplus(-g)` and
/// `log(1-f) = -softplus(g)`.
pub fn risk_direct(data: &PuDataset, model: &LinearScoreModel, kappa: f64) -> Result<RiskValue> {
    check(data, model, kappa)?;
    let p = model.weights().len();
    let mut z = vec![0.0; p];
    let mut grad = vec![0.0; p];

    let n = data.positives().nrows() as f64;
    let mut log_f = 0.0;
    let mut log_1mf = 0.0;
    for x in data.positives().rows() {
        let g = model.score_unchecked(x);
        let f = sigmoid(g);
        log_f += -softplus(-g);
        log_1mf += -softplus(g);
        model.augment_into(x, &mut z);
        // d(-log f)/dg = -(1-f), d(log(1-f))/dg = -f
        for (gr, zj) in grad.iter_mut().zip(&z) {
            *gr += kappa * (-(1.0 - f) - f) * zj / n;
        }
    }

    let m = data.unlabeled().nrows() as f64;
    let mut u_term = 0.0;
    for x in data.unlabeled().rows() {
        let g = model.score_unchecked(x);
        let f = sigmoid(g);
        u_term += -(-softplus(g));
        model.augment_into(x, &mut z);
        for (gr, zj) in grad.iter_mut().zip(&z) {
            *gr += f * zj / m;
        }
    }

    let value = -kappa * (log_f / n) + kappa * (log_1mf / n) + u_term / m;
    Ok(RiskValue { value, grad })
}

/// Logistic-loss form `-κ·mean_P[g] + mean_U[softplus(g)]`.
pub fn risk_simplified(
    data: &PuDataset,
    model: &LinearScoreModel,
    kappa: f64,
) -> Result<RiskValue> {
    check(data, model, kappa)?;
    let pos_mean = positive_feature_mean(data, model);
    let (u_value, u_grad) = unlabeled_terms(data, model);
    let value = -kappa * crate::matrix::dot(model.weights(), &pos_mean) + u_value;
    let grad = u_grad
        .iter()
        .zip(&pos_mean)
        .map(|(u, p)| u - kappa * p)
        .collect();
    Ok(RiskValue { value, grad })
}

/// `∇θ R = -κ·mean_P[z] + mean_U[f(x')·z]`.
pub fn risk_gradient(data: &PuDataset, model: &LinearScoreModel, kappa: f64) -> Result<Vec<f64>> {
    risk_simplified(data, model, kappa).map(|r| r.grad)
}

/// Risk plus the ridge penalty `λ‖θ‖²`.
pub fn penalized_risk(
    data: &PuDataset,
    model: &LinearScoreModel,
    kappa: f64,
    ridge: f64,
) -> Result<RiskValue> {
    let mut r = risk_simplified(data, model, kappa)?;
    if ridge > 0.0 {
        for (g, w) in r.grad.iter_mut().zip(model.weights()) {
            *g += 2.0 * ridge * w;
        }
        r.value += ridge * model.weights().iter().map(|w| w * w).sum::<f64>();
    }
    Ok(r)
}

/// `mean_P[z]`, the (augmented) mean positive feature vector.
pub(crate) fn positive_feature_mean(data: &PuDataset, model: &LinearScoreModel) -> Vec<f64> {
    let means = data.positives().column_means();
    if model.with_bias() {
        std::iter::once(1.0).chain(means).collect()
    } else {
        means
    }
}

/// `(mean_U[softplus(g)], mean_U[f·z])`.
fn unlabeled_terms(data: &PuDataset, model: &LinearScoreModel) -> (f64, Vec<f64>) {
    let p = model.weights().len();
    let off = usize::from(model.with_bias());
    let mut value = 0.0;
    let mut grad = vec![0.0; p];
    for x in data.unlabeled().rows() {
        let g = model.score_unchecked(x);
        value += softplus(g);
        let f = sigmoid(g);
        if off == 1 {
            grad[0] += f;
        }
        for (gr, xj) in grad[off..].iter_mut().zip(x) {
            *gr += f * xj;
        }
    }
    let m = data.unlabeled().nrows() as f64;
    grad.iter_mut().for_each(|g| *g /= m);
    (value / m, grad)
}
