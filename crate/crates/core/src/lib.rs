//! Alternating estimation of a binary classifier and the class-prior from
//! positive and unlabeled (PU) data, plus a population-level quadrature
//! oracle for the fixed-point map that drives it.

// negated comparisons are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alternate;
pub mod bench;
pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod matrix;
pub mod mixture;
pub mod model;
pub mod optimize;
pub mod population;
pub mod risk;

pub use alternate::{estimate_prior_from_model, run_alternate, PriorTrajectory, RestartEvent};
pub use config::{AlternateConfig, InitWeights, OptimizerConfig};
pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use mixture::MixtureSpec;
pub use model::{sigmoid, softplus, LinearScoreModel, ModelKind, PuDataset};
pub use optimize::{minimize_risk, MinimizeOutcome};
pub use risk::{penalized_risk, risk_direct, risk_gradient, risk_simplified, RiskValue};
