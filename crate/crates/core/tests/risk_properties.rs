use altest_core::{
    penalized_risk, risk_direct, risk_gradient, risk_simplified, DenseMatrix, LinearScoreModel,
    PuDataset,
};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize, vals: &[f64]) -> DenseMatrix {
    DenseMatrix::from_row_major(rows, cols, vals[..rows * cols].to_vec()).unwrap()
}

prop_compose! {
    fn instance()(d in 1usize..=10, n in 1usize..=50, m in 1usize..=50, with_bias in any::<bool>())
        (p in prop::collection::vec(-3.0f64..3.0, n * d),
         u in prop::collection::vec(-3.0f64..3.0, m * d),
         theta in prop::collection::vec(-2.0f64..2.0, d + with_bias as usize),
         kappa in 0.0f64..=1.0,
         d in Just(d), n in Just(n), m in Just(m), with_bias in Just(with_bias))
        -> (PuDataset, LinearScoreModel, f64)
    {
        let data = PuDataset::new(matrix(n, d, &p), matrix(m, d, &u)).unwrap();
        (data, LinearScoreModel::new(theta, with_bias).unwrap(), kappa)
    }
}

fn central_difference(f: impl Fn(&[f64]) -> f64, theta: &[f64], h: f64) -> Vec<f64> {
    (0..theta.len())
        .map(|j| {
            let mut plus = theta.to_vec();
            let mut minus = theta.to_vec();
            plus[j] += h;
            minus[j] -= h;
            (f(&plus) - f(&minus)) / (2.0 * h)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gradient_matches_finite_differences((data, model, kappa) in instance()) {
        let grad = risk_gradient(&data, &model, kappa).unwrap();
        let value = |t: &[f64]| {
            let m = LinearScoreModel::new(t.to_vec(), model.with_bias()).unwrap();
            risk_simplified(&data, &m, kappa).unwrap().value
        };
        let fd = central_difference(value, model.weights(), 1e-6);
        for (a, b) in grad.iter().zip(&fd) {
            prop_assert!((a - b).abs() <= 1e-5 * a.abs().max(1.0), "analytic {a} vs fd {b}");
        }
    }

    #[test]
    fn direct_gradient_agrees((data, model, kappa) in instance()) {
        let a = risk_direct(&data, &model, kappa).unwrap();
        let b = risk_simplified(&data, &model, kappa).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-10);
        for (x, y) in a.grad.iter().zip(&b.grad) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn ridge_adds_its_own_gradient((data, model, kappa) in instance(), ridge in 0.0f64..1.0) {
        let plain = risk_simplified(&data, &model, kappa).unwrap();
        let pen = penalized_risk(&data, &model, kappa, ridge).unwrap();
        let sq: f64 = model.weights().iter().map(|w| w * w).sum();
        prop_assert!((pen.value - plain.value - ridge * sq).abs() <= 1e-12 * (1.0 + pen.value.abs()));
        for ((p, g), w) in pen.grad.iter().zip(&plain.grad).zip(model.weights()) {
            prop_assert!((p - g - 2.0 * ridge * w).abs() <= 1e-12);
        }
    }

    #[test]
    fn kappa_derivative_is_minus_mean_positive_score((data, model, kappa) in instance()) {
        let k0 = (kappa - 1e-4).max(0.0);
        let k1 = (kappa + 1e-4).min(1.0);
        prop_assume!(k1 > k0);
        let r0 = risk_simplified(&data, &model, k0).unwrap().value;
        let r1 = risk_simplified(&data, &model, k1).unwrap().value;
        let mean_g: f64 = data.positives().rows().map(|x| model.score(x).unwrap()).sum::<f64>()
            / data.positives().nrows() as f64;
        // the risk is affine in kappa
        prop_assert!(((r1 - r0) / (k1 - k0) + mean_g).abs() <= 1e-8 * (1.0 + mean_g.abs()));
    }
}
