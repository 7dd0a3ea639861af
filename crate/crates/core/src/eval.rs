//! Evaluation metrics.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::data::{GaussianPair, LabeledDataset};
use crate::error::{Error, Result};
use crate::model::LinearScoreModel;

/// Fraction of rows where `sign(f(x) - 0.5)` disagrees with the label.
pub fn error_rate(model: &LinearScoreModel, data: &LabeledDataset) -> Result<f64> {
    model.check_dim(data.dim())?;
    if data.is_empty() {
        return Err(Error::InvalidArgument("empty evaluation set".into()));
    }
    let wrong = data
        .features()
        .rows()
        .zip(data.labels())
        .filter(|(x, &y)| {
            let pred = if model.score_unchecked(x) > 0.0 { 1 } else { -1 };
            pred != y
        })
        .count();
    Ok(wrong as f64 / data.len() as f64)
}

/// Bayes error of two Gaussians sharing one isotropic standard deviation.
pub fn bayes_error(spec: &GaussianPair) -> Result<f64> {
    spec.validate()?;
    let sigma = spec.std_pos[0];
    if spec.std_pos.iter().chain(&spec.std_neg).any(|s| *s != sigma) {
        return Err(Error::InvalidArgument(
            "closed-form Bayes error needs one shared isotropic standard deviation".into(),
        ));
    }
    let pi = spec.prior;
    if pi == 0.0 || pi == 1.0 {
        return Ok(0.0);
    }
    let dist: f64 = spec
        .mean_pos
        .iter()
        .zip(&spec.mean_neg)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
        / sigma;
    if dist == 0.0 {
        return Ok(pi.min(1.0 - pi));
    }
    // along the mean-difference axis: positives ~ N(Δ/2, 1), negatives ~ N(-Δ/2, 1),
    // predict positive when Δ·u + ln(π/(1-π)) > 0
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    let t = -(pi / (1.0 - pi)).ln() / dist;
    Ok(pi * std.cdf(t - dist / 2.0) + (1.0 - pi) * std.sf(t + dist / 2.0))
}

/// Sample mean and (n-1) standard deviation; the deviation is 0 for one value.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::sample_labeled;
    use crate::matrix::DenseMatrix;
    use approx::assert_abs_diff_eq;

    #[test]
    fn symmetric_bayes_error() {
        // equal priors, means ±2: error = Φ(-2)
        let s = GaussianPair::isotropic(vec![2.0], vec![-2.0], 0.5);
        assert_abs_diff_eq!(bayes_error(&s).unwrap(), 0.022_750_131_948_179_2, epsilon = 1e-10);
    }

    #[test]
    fn bayes_error_matches_monte_carlo() {
        let s = GaussianPair::isotropic(vec![1.0, 0.5], vec![-0.5, 0.0], 0.3);
        let be = bayes_error(&s).unwrap();
        // Bayes rule for this pair: w = μ₊ - μ₋, b = (|μ₋|² - |μ₊|²)/2 + ln(π/(1-π))
        let w = [1.5, 0.5];
        let b = (0.25 - 1.25) / 2.0 + (0.3f64 / 0.7).ln();
        let rule = LinearScoreModel::new(vec![b, w[0], w[1]], true).unwrap();
        let test = sample_labeled(&s, 200_000, 5).unwrap();
        let mc = error_rate(&rule, &test).unwrap();
        assert!((mc - be).abs() < 0.005, "mc {mc} vs analytic {be}");
    }

    #[test]
    fn error_rate_counts() {
        let d = LabeledDataset::new(DenseMatrix::from_rows(&[[1.0], [-1.0], [2.0], [-3.0]]).unwrap(), vec![1, 1, -1, -1]).unwrap();
        let m = LinearScoreModel::new(vec![1.0], false).unwrap();
        assert_eq!(error_rate(&m, &d).unwrap(), 0.5);
    }

    #[test]
    fn mean_std_values() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_abs_diff_eq!(m, 2.5);
        assert_abs_diff_eq!(s, (5.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_eq!(mean_std(&[7.0]), (7.0, 0.0));
    }
}
