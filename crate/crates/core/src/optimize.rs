//! Inner minimization of the penalized PU risk for a fixed κ.
//!
//! The objective `-κ·θᵀmean_P[z] + mean_U[softplus(θᵀz)] + λ‖θ‖²` is smooth
//! and convex. Steps are Newton directions on the (damped) Hessian
//! `mean_U[f(1-f)·zzᵀ] + 2λI`, falling back to steepest descent when the
//! factorization fails, with Armijo backtracking on every step.

use nalgebra::{DMatrix, DVector};

use crate::config::OptimizerConfig;
use crate::error::{Error, Result};
use crate::model::{sigmoid, softplus, LinearScoreModel, PuDataset};
use crate::risk::{positive_feature_mean, RiskValue};

const ARMIJO_C: f64 = 1e-4;
const BACKTRACK: f64 = 0.5;
const MIN_STEP: f64 = 1e-20;

/// Result of a single inner minimization.
#[derive(Debug, Clone)]
pub struct MinimizeOutcome {
    pub model: LinearScoreModel,
    /// Penalized objective and its gradient at `model`.
    pub risk: RiskValue,
    pub converged: bool,
    pub iterations: usize,
    /// Objective value at the initial point and after every accepted step.
    pub history: Vec<f64>,
}

struct Objective<'a> {
    data: &'a PuDataset,
    pos_mean: Vec<f64>,
    kappa: f64,
    ridge: f64,
    with_bias: bool,
}

impl<'a> Objective<'a> {
    fn score(&self, w: &[f64], x: &[f64]) -> f64 {
        if self.with_bias {
            w[0] + crate::matrix::dot(&w[1..], x)
        } else {
            crate::matrix::dot(w, x)
        }
    }

    fn penalty(&self, w: &[f64]) -> f64 {
        self.ridge * w.iter().map(|v| v * v).sum::<f64>()
    }

    fn value(&self, w: &[f64]) -> f64 {
        let m = self.data.unlabeled().nrows() as f64;
        let u: f64 = self
            .data
            .unlabeled()
            .rows()
            .map(|x| softplus(self.score(w, x)))
            .sum::<f64>()
            / m;
        -self.kappa * crate::matrix::dot(w, &self.pos_mean) + u + self.penalty(w)
    }

    /// Value, gradient and Hessian in one pass over the unlabeled rows.
    fn second_order(&self, w: &[f64]) -> (f64, Vec<f64>, DMatrix<f64>) {
        let p = w.len();
        let off = usize::from(self.with_bias);
        let mut value = 0.0;
        let mut grad = vec![0.0; p];
        let mut hess = DMatrix::<f64>::zeros(p, p);
        let mut z = vec![0.0; p];
        for x in self.data.unlabeled().rows() {
            if off == 1 {
                z[0] = 1.0;
            }
            z[off..].copy_from_slice(x);
            let g = self.score(w, x);
            value += softplus(g);
            let f = sigmoid(g);
            let c = f * (1.0 - f);
            for i in 0..p {
                grad[i] += f * z[i];
                if c > 0.0 {
                    let ci = c * z[i];
                    for j in i..p {
                        hess[(i, j)] += ci * z[j];
                    }
                }
            }
        }
        let m = self.data.unlabeled().nrows() as f64;
        value = value / m - self.kappa * crate::matrix::dot(w, &self.pos_mean) + self.penalty(w);
        for i in 0..p {
            grad[i] = grad[i] / m - self.kappa * self.pos_mean[i] + 2.0 * self.ridge * w[i];
            for j in i..p {
                let v = hess[(i, j)] / m + if i == j { 2.0 * self.ridge } else { 0.0 };
                hess[(i, j)] = v;
                hess[(j, i)] = v;
            }
        }
        (value, grad, hess)
    }
}

fn newton_direction(grad: &[f64], hess: DMatrix<f64>) -> Option<Vec<f64>> {
    let p = grad.len();
    let scale = (0..p).map(|i| hess[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let rhs = DVector::from_iterator(p, grad.iter().map(|g| -g));
    let mut damping = 1e-12 * scale;
    for _ in 0..8 {
        let mut h = hess.clone();
        for i in 0..p {
            h[(i, i)] += damping;
        }
        if let Some(chol) = h.cholesky() {
            let d = chol.solve(&rhs);
            if d.iter().all(|v| v.is_finite()) {
                return Some(d.iter().copied().collect());
            }
        }
        damping *= 100.0;
    }
    None
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// Minimizes the penalized risk at prior `kappa`, starting from `init`.
///
/// Returns when the gradient sup-norm drops below `cfg.grad_tol`, or after
/// `cfg.max_inner_iters` steps (or a stalled line search) with
/// `converged = false`. Objective values never increase along the way.
pub fn minimize_risk(
    data: &PuDataset,
    kappa: f64,
    cfg: &OptimizerConfig,
    init: &LinearScoreModel,
) -> Result<MinimizeOutcome> {
    cfg.validate()?;
    init.check_dim(data.dim())?;
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::InvalidArgument(format!("kappa {kappa} outside [0, 1]")));
    }
    let obj = Objective {
        data,
        pos_mean: positive_feature_mean(data, init),
        kappa,
        ridge: cfg.ridge,
        with_bias: init.with_bias(),
    };

    let mut w = init.weights().to_vec();
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let (mut value, mut grad, mut hess) = obj.second_order(&w);

    loop {
        if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteIterate { iterate: w });
        }
        history.push(value);
        if sup_norm(&grad) <= cfg.grad_tol {
            converged = true;
            break;
        }
        if iterations >= cfg.max_inner_iters {
            break;
        }

        let mut dir = newton_direction(&grad, hess).unwrap_or_else(|| grad.iter().map(|g| -g).collect());
        let mut slope = crate::matrix::dot(&grad, &dir);
        if !(slope < 0.0) {
            dir = grad.iter().map(|g| -g).collect();
            slope = crate::matrix::dot(&grad, &dir);
        }

        let mut t = 1.0;
        let mut accepted = None;
        while t >= MIN_STEP {
            let trial: Vec<f64> = w.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
            if trial.iter().all(|v| v.is_finite()) {
                let v = obj.value(&trial);
                if v.is_finite() && v <= value + ARMIJO_C * t * slope {
                    accepted = Some(trial);
                    break;
                }
            }
            t *= BACKTRACK;
        }
        let Some(next) = accepted else {
            // line search stalled: no representable decrease along the direction
            break;
        };
        w = next;
        iterations += 1;
        (value, grad, hess) = obj.second_order(&w);
    }

    let model = LinearScoreModel::new(w.clone(), init.with_bias())
        .map_err(|_| Error::NonFiniteIterate { iterate: w })?;
    Ok(MinimizeOutcome {
        model,
        risk: RiskValue { value, grad },
        converged,
        iterations,
        history,
    })
}
