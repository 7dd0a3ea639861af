//! Alternating estimation of the classifier and the class-prior.
//!
//! Each outer step minimizes the risk at the current prior, then replaces the
//! prior with the mean score over the unlabeled set. An update above `delta`
//! lowers the initial prior by `xi` and restarts from zero weights.

use serde::{Deserialize, Serialize};

use crate::config::{AlternateConfig, InitWeights};
use crate::error::{Error, Result};
use crate::model::{LinearScoreModel, PuDataset};
use crate::optimize::minimize_risk;

/// A restart: at outer iteration `iteration` the initial prior was lowered to
/// `new_initial_prior`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestartEvent {
    pub iteration: usize,
    pub new_initial_prior: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorTrajectory {
    /// `priors[k]` is the prior used at outer iteration `k`; the last entry is
    /// the final estimate.
    pub priors: Vec<f64>,
    pub restarts: Vec<RestartEvent>,
    pub converged: bool,
    pub final_model: LinearScoreModel,
    /// Outer iterations whose inner minimization hit its budget.
    pub inner_unconverged: usize,
}

impl PriorTrajectory {
    pub fn estimated_prior(&self) -> f64 {
        *self.priors.last().expect("trajectory always holds the initial prior")
    }

    pub fn outer_iterations(&self) -> usize {
        self.priors.len() - 1
    }
}

/// Mean of `f(x')` over the unlabeled rows.
pub fn estimate_prior_from_model(data: &PuDataset, model: &LinearScoreModel) -> Result<f64> {
    model.check_dim(data.dim())?;
    let u = data.unlabeled();
    let sum: f64 = u
        .rows()
        .map(|x| crate::model::sigmoid(model.score_unchecked(x)))
        .sum();
    Ok(sum / u.nrows() as f64)
}

pub fn run_alternate(
    data: &PuDataset,
    cfg: &AlternateConfig,
    with_bias: bool,
) -> Result<PriorTrajectory> {
    cfg.validate()?;
    let dim = data.dim();
    let zeros = LinearScoreModel::zeros(dim, with_bias);

    let mut initial = cfg.initial_prior;
    let mut current = initial;
    let mut priors = vec![current];
    let mut restarts = Vec::new();
    let mut model = zeros.clone();
    let mut fresh = true;
    let mut converged = false;
    let mut inner_unconverged = 0;

    for k in 0..cfg.max_outer_iters {
        let init = match cfg.inner_opt.init_weights {
            InitWeights::WarmStart if !fresh => &model,
            _ => &zeros,
        };
        let out = minimize_risk(data, current, &cfg.inner_opt, init)?;
        if !out.converged {
            inner_unconverged += 1;
        }
        model = out.model;
        fresh = false;
        let next = estimate_prior_from_model(data, &model)?;

        if next > cfg.delta {
            let lowered = initial - cfg.xi;
            if lowered - cfg.xi <= 1e-12 {
                return Err(Error::InitialPriorExhausted {
                    restarts: restarts.len(),
                    iteration: k + 1,
                    next_initial_prior: lowered,
                    xi: cfg.xi,
                });
            }
            initial = lowered;
            restarts.push(RestartEvent {
                iteration: k + 1,
                new_initial_prior: initial,
            });
            current = initial;
            priors.push(current);
            model = zeros.clone();
            fresh = true;
            continue;
        }

        priors.push(next);
        let step = (next - current).abs();
        current = next;
        if step < cfg.prior_tol {
            converged = true;
            break;
        }
    }

    Ok(PriorTrajectory {
        priors,
        restarts,
        converged,
        final_model: model,
        inner_unconverged,
    })
}
