use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One-dimensional two-component Gaussian mixture on a truncated domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub mu_pos: f64,
    pub mu_neg: f64,
    pub sigma_pos: f64,
    pub sigma_neg: f64,
    pub true_prior: f64,
    /// Upper truncation `1 - epsilon` applied to the score function.
    pub epsilon: f64,
    pub domain: (f64, f64),
}

impl Default for MixtureSpec {
    fn default() -> Self {
        Self {
            mu_pos: 2.0,
            mu_neg: -2.0,
            sigma_pos: 1.0,
            sigma_neg: 1.0,
            true_prior: 0.5,
            epsilon: 0.01,
            domain: (-10.0, 10.0),
        }
    }
}

impl MixtureSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if ![self.mu_pos, self.mu_neg, self.domain.0, self.domain.1]
            .iter()
            .all(|v| v.is_finite())
        {
            return bad("means and domain must be finite");
        }
        if !(self.sigma_pos > 0.0 && self.sigma_neg > 0.0) {
            return bad("standard deviations must be > 0");
        }
        if !(self.true_prior >= 0.0 && self.true_prior <= 1.0) {
            return bad("true_prior must lie in [0, 1]");
        }
        if !(self.epsilon >= 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in [0, 1)");
        }
        if !(self.domain.0 < self.domain.1) {
            return bad("domain must satisfy lo < hi");
        }
        Ok(())
    }
}
