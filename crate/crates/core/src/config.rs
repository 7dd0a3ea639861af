use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the inner solver initializes θ on non-restart outer iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitWeights {
    Zeros,
    WarmStart,
}

/// Settings for the inner risk minimization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_inner_iters: usize,
    /// Stop once the sup-norm of the gradient falls below this.
    pub grad_tol: f64,
    /// Coefficient λ of the penalty `λ‖θ‖²`.
    pub ridge: f64,
    pub init_weights: InitWeights,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_inner_iters: 1000,
            grad_tol: 1e-6,
            ridge: 1e-6,
            init_weights: InitWeights::WarmStart,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) {
            return Err(Error::InvalidArgument("grad_tol must be > 0".into()));
        }
        if !(self.ridge >= 0.0) || !self.ridge.is_finite() {
            return Err(Error::InvalidArgument("ridge must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// Hyperparameters of the alternating prior/classifier estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternateConfig {
    pub initial_prior: f64,
    /// Restart threshold: an update above `delta` triggers a restart.
    pub delta: f64,
    /// Amount the initial prior is lowered on each restart.
    pub xi: f64,
    pub max_outer_iters: usize,
    /// Convergence threshold on successive prior estimates; 0 runs the full budget.
    pub prior_tol: f64,
    pub inner_opt: OptimizerConfig,
    pub seed: u64,
}

impl Default for AlternateConfig {
    fn default() -> Self {
        Self {
            initial_prior: 0.9,
            delta: 0.9,
            xi: 0.01,
            max_outer_iters: 150,
            prior_tol: 1e-4,
            inner_opt: OptimizerConfig::default(),
            seed: 0,
        }
    }
}

impl AlternateConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if !(self.initial_prior > 0.0 && self.initial_prior < 1.0) {
            return bad("initial_prior must lie in (0, 1)");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if !(self.xi > 0.0) {
            return bad("xi must be > 0");
        }
        if self.xi >= self.initial_prior {
            return bad("xi must be smaller than initial_prior");
        }
        if self.delta < self.xi {
            return bad("delta must be >= xi");
        }
        if self.max_outer_iters == 0 {
            return bad("max_outer_iters must be >= 1");
        }
        if !(self.prior_tol >= 0.0) {
            return bad("prior_tol must be >= 0");
        }
        self.inner_opt.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        AlternateConfig::default().validate().unwrap();
        let d = AlternateConfig::default();
        assert_eq!((d.initial_prior, d.delta, d.xi, d.max_outer_iters), (0.9, 0.9, 0.01, 150));
    }

    #[test]
    fn rejects_invalid() {
        let mut c = AlternateConfig::default();
        c.xi = 0.95;
        assert!(c.validate().is_err());
        let mut c = AlternateConfig::default();
        c.delta = 1.0;
        assert!(c.validate().is_err());
        let mut c = AlternateConfig::default();
        c.delta = 0.001;
        assert!(c.validate().is_err());
        let mut c = AlternateConfig::default();
        c.inner_opt.grad_tol = 0.0;
        assert!(c.validate().is_err());
        let mut c = AlternateConfig::default();
        c.inner_opt.ridge = -1.0;
        assert!(c.validate().is_err());
    }
}
