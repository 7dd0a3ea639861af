//! Population-level fixed-point map for a 1-D two-Gaussian mixture.
//!
//! With infinitely many samples and scores truncated at `1 - ε`, the risk
//! minimizer at prior `π_k` is `min(π_k·p(x|+1)/p(x), 1 - ε)` and the next
//! prior is its integral against `p(x)`. Integrals use composite Simpson on a
//! uniform grid over the (truncated) domain.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mixture::MixtureSpec;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Nodes and composite Simpson weights on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    /// `n` must be odd and at least 3.
    pub fn simpson(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "Simpson grid needs an odd node count >= 3, got {n}"
            )));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument("grid requires finite lo < hi".into()));
        }
        let h = (hi - lo) / (n - 1) as f64;
        let nodes = (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + i as f64 * h })
            .collect();
        let weights = (0..n)
            .map(|i| {
                let c = if i == 0 || i == n - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * h / 3.0
            })
            .collect();
        Ok(Self { nodes, weights })
    }

    /// Default grid for a spec: 20001 nodes over its domain.
    pub fn for_spec(spec: &MixtureSpec) -> Result<Self> {
        Self::simpson(spec.domain.0, spec.domain.1, 20_001)
    }

    /// Same interval with twice as many panels.
    pub fn refined(&self) -> Self {
        let n = 2 * (self.nodes.len() - 1) + 1;
        Self::simpson(self.lo(), self.hi(), n).expect("refinement of a valid grid is valid")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn lo(&self) -> f64 {
        self.nodes[0]
    }

    pub fn hi(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn spacing(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn log_normal_pdf(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    -0.5 * z * z - sigma.ln() - LN_SQRT_2PI
}

pub fn density_pos(spec: &MixtureSpec, x: f64) -> f64 {
    log_normal_pdf(x, spec.mu_pos, spec.sigma_pos).exp()
}

pub fn density_neg(spec: &MixtureSpec, x: f64) -> f64 {
    log_normal_pdf(x, spec.mu_neg, spec.sigma_neg).exp()
}

/// `p(x) = π·p(x|+1) + (1-π)·p(x|-1)`.
pub fn density_mix(spec: &MixtureSpec, x: f64) -> f64 {
    spec.true_prior * density_pos(spec, x) + (1.0 - spec.true_prior) * density_neg(spec, x)
}

/// `p(x)/p(x|+1)`, evaluated through the log-density difference.
fn mix_to_pos_ratio(spec: &MixtureSpec, x: f64) -> f64 {
    let d = log_normal_pdf(x, spec.mu_neg, spec.sigma_neg)
        - log_normal_pdf(x, spec.mu_pos, spec.sigma_pos);
    spec.true_prior + (1.0 - spec.true_prior) * d.exp()
}

fn check_prior(prior_k: f64) -> Result<()> {
    if !(prior_k > 0.0 && prior_k <= 1.0) {
        return Err(Error::InvalidArgument(format!("prior {prior_k} outside (0, 1]")));
    }
    Ok(())
}

fn check_grid(spec: &MixtureSpec, grid: &QuadratureGrid) -> Result<()> {
    spec.validate()?;
    if grid.lo() > spec.domain.0 || grid.hi() < spec.domain.1 {
        return Err(Error::InvalidArgument(format!(
            "grid [{}, {}] does not cover domain [{}, {}]",
            grid.lo(),
            grid.hi(),
            spec.domain.0,
            spec.domain.1
        )));
    }
    Ok(())
}

/// Stationary score `min(π_k·p(x|+1)/p(x), 1-ε)`.
///
/// Points where `p(x)` underflows are assigned to the truncated region.
pub fn stationary_f(spec: &MixtureSpec, prior_k: f64, x: f64) -> Result<f64> {
    check_prior(prior_k)?;
    let cap = 1.0 - spec.epsilon;
    if density_mix(spec, x) == 0.0 {
        return Ok(cap);
    }
    Ok(stationary_unchecked(spec, prior_k, x))
}

fn stationary_unchecked(spec: &MixtureSpec, prior_k: f64, x: f64) -> f64 {
    let cap = 1.0 - spec.epsilon;
    let ratio = prior_k / mix_to_pos_ratio(spec, x);
    if ratio > cap {
        cap
    } else {
        ratio
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PiMax {
    pub value: f64,
    /// Value on the twice-refined grid.
    pub refined_value: f64,
    /// Set when refinement moves the value by more than `REFINE_TOL`.
    pub grid_too_coarse: bool,
    /// Node attaining the minimum of `p(x)/p(x|+1)`.
    pub argmin: f64,
}

pub const REFINE_TOL: f64 = 1e-6;

fn pi_max_on(spec: &MixtureSpec, grid: &QuadratureGrid) -> (f64, f64) {
    let (x, r) = grid
        .nodes()
        .iter()
        .map(|&x| (x, mix_to_pos_ratio(spec, x)))
        // ties resolve to the right-most node
        .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 <= best.1 { cur } else { best });
    ((1.0 - spec.epsilon) * r, x)
}

/// Largest α with `(1-ε)·p(x) >= α·p(x|+1)` on every grid node.
pub fn pi_max(spec: &MixtureSpec, grid: &QuadratureGrid) -> Result<PiMax> {
    check_grid(spec, grid)?;
    let (value, argmin) = pi_max_on(spec, grid);
    let (refined_value, _) = pi_max_on(spec, &grid.refined());
    Ok(PiMax {
        value,
        refined_value,
        grid_too_coarse: (value - refined_value).abs() > REFINE_TOL,
        argmin,
    })
}

/// Next population prior `∫ f*(x) p(x) dx`.
pub fn population_update(spec: &MixtureSpec, prior_k: f64, grid: &QuadratureGrid) -> Result<f64> {
    check_grid(spec, grid)?;
    check_prior(prior_k)?;
    let cap = 1.0 - spec.epsilon;
    let v = grid.integrate(|x| {
        let p = density_mix(spec, x);
        if p == 0.0 {
            0.0
        } else {
            stationary_unchecked(spec, prior_k, x) * p
        }
    });
    if !v.is_finite() {
        return Err(Error::Quadrature(format!("update at prior {prior_k} is {v}")));
    }
    debug_assert!(v <= cap + 1e-9);
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma2Gap {
    pub value: f64,
    /// The prior is at or below π_max, so the positive part vanishes.
    pub below_pi_max: bool,
}

/// `∫ (π_k·p(x|+1) - (1-ε)·p(x))₊ dx`, integrated directly from the densities.
pub fn lemma2_gap(spec: &MixtureSpec, prior_k: f64, grid: &QuadratureGrid) -> Result<Lemma2Gap> {
    check_grid(spec, grid)?;
    check_prior(prior_k)?;
    let (pm, _) = pi_max_on(spec, grid);
    if prior_k <= pm {
        return Ok(Lemma2Gap {
            value: 0.0,
            below_pi_max: true,
        });
    }
    let cap = 1.0 - spec.epsilon;
    let value = grid.integrate(|x| (prior_k * density_pos(spec, x) - cap * density_mix(spec, x)).max(0.0));
    if !value.is_finite() {
        return Err(Error::Quadrature(format!("gap at prior {prior_k} is {value}")));
    }
    Ok(Lemma2Gap {
        value,
        below_pi_max: false,
    })
}

/// One row of a population iteration trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopulationStep {
    pub k: usize,
    pub prior: f64,
    /// `prior_k - prior_{k+1}`; absent on the last row.
    pub gap: Option<f64>,
    /// `lemma2_gap` at `prior_k`.
    pub lemma2_rhs: f64,
}

/// Monotonicity slack for the population iteration.
pub const MONOTONE_TOL: f64 = 1e-12;

/// Iterates the population map from `prior_0`.
///
/// Stops once a step changes the prior by less than `tol`, or after
/// `max_iters` steps. A step that increases the prior by more than
/// `MONOTONE_TOL` is reported as an error.
pub fn iterate_population(
    spec: &MixtureSpec,
    prior_0: f64,
    grid: &QuadratureGrid,
    max_iters: usize,
    tol: f64,
) -> Result<Vec<PopulationStep>> {
    check_grid(spec, grid)?;
    check_prior(prior_0)?;
    let (pm, _) = pi_max_on(spec, grid);
    if prior_0 < pm - MONOTONE_TOL {
        return Err(Error::InvalidArgument(format!(
            "initial prior {prior_0} is below pi_max {pm}"
        )));
    }
    let mut steps = Vec::with_capacity(max_iters + 1);
    let mut prior = prior_0;
    for k in 0..max_iters {
        let next = population_update(spec, prior, grid)?;
        let rhs = lemma2_gap(spec, prior, grid)?.value;
        if next > prior + MONOTONE_TOL {
            return Err(Error::NonMonotone {
                step: k,
                prev: prior,
                next,
            });
        }
        steps.push(PopulationStep {
            k,
            prior,
            gap: Some(prior - next),
            lemma2_rhs: rhs,
        });
        let done = (prior - next).abs() < tol;
        prior = next;
        if done {
            break;
        }
    }
    steps.push(PopulationStep {
        k: steps.len(),
        prior,
        gap: None,
        lemma2_rhs: lemma2_gap(spec, prior, grid)?.value,
    });
    Ok(steps)
}

/// Ingredients of the one-dimensional convergence-rate bound
/// `1/y_{k+1} - 1/y_k >= p*² / (2³·(L₁ + L₂))`, with `y_k = π_k - π_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateBound {
    /// Grid node where `π_max` is attained.
    pub x_star: f64,
    /// `p(x*|+1)`.
    pub p_star: f64,
    /// Grid estimate of the Lipschitz constant of `p`.
    pub lipschitz_mix: f64,
    /// Grid estimate of the Lipschitz constant of `p(·|+1)`.
    pub lipschitz_pos: f64,
    pub constant: f64,
}

pub fn rate_bound(spec: &MixtureSpec, grid: &QuadratureGrid) -> Result<RateBound> {
    check_grid(spec, grid)?;
    let (_, x_star) = pi_max_on(spec, grid);
    let p_star = density_pos(spec, x_star);
    let h = grid.spacing();
    let lip = |f: &dyn Fn(f64) -> f64| {
        grid.nodes()
            .windows(2)
            .map(|w| (f(w[1]) - f(w[0])).abs() / h)
            .fold(0.0, f64::max)
    };
    let lipschitz_mix = lip(&|x| density_mix(spec, x));
    let lipschitz_pos = lip(&|x| density_pos(spec, x));
    Ok(RateBound {
        x_star,
        p_star,
        lipschitz_mix,
        lipschitz_pos,
        constant: p_star * p_star / (8.0 * (lipschitz_mix + lipschitz_pos)),
    })
}

/// Checks `1/aⁿ - b/aⁿ⁺¹ <= 1/bⁿ - 1/aⁿ` for `a >= b > 0`, with `1e-12`
/// slack relative to the magnitude of the terms.
pub fn lemma3_check(a: f64, b: f64, n: u32) -> Result<bool> {
    Ok(lemma3_slack(a, b, n)? >= -1e-12)
}

/// `(1/bⁿ - 1/aⁿ) - (1/aⁿ - b/aⁿ⁺¹)`, scaled by `1/bⁿ` (the largest term).
pub fn lemma3_slack(a: f64, b: f64, n: u32) -> Result<f64> {
    if !(b > 0.0 && a >= b && a.is_finite()) || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "need a >= b > 0 and n >= 1, got a={a}, b={b}, n={n}"
        )));
    }
    // divide through by 1/bⁿ: with r = b/a <= 1 the inequality reads
    // rⁿ - rⁿ⁺¹ <= 1 - rⁿ
    let r = b / a;
    let rn = r.powi(n as i32);
    let lhs = rn - rn * r;
    let rhs = 1.0 - rn;
    Ok(rhs - lhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reference() -> MixtureSpec {
        MixtureSpec::default()
    }

    #[test]
    fn simpson_weights_sum_to_width() {
        let g = QuadratureGrid::simpson(-10.0, 10.0, 20_001).unwrap();
        assert_abs_diff_eq!(g.weights().iter().sum::<f64>(), 20.0, epsilon = 1e-10);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(QuadratureGrid::simpson(0.0, 1.0, 4).is_err());
        assert!(QuadratureGrid::simpson(1.0, 1.0, 5).is_err());
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let g = QuadratureGrid::simpson(-1.0, 2.0, 7).unwrap();
        assert_abs_diff_eq!(g.integrate(|x| x * x * x - x + 1.0), 3.75 - 1.5 + 3.0, epsilon = 1e-13);
    }

    #[test]
    fn densities() {
        let s = reference();
        assert_abs_diff_eq!(density_pos(&s, 2.0), 0.398_942_280_401_432_7, epsilon = 1e-15);
        assert_abs_diff_eq!(density_mix(&s, 0.0), (-2.0f64).exp() / (2.0 * std::f64::consts::PI).sqrt(), epsilon = 1e-15);
        let s0 = MixtureSpec { true_prior: 0.0, ..reference() };
        for x in [-3.0, 0.0, 1.5] {
            assert_eq!(density_mix(&s0, x), density_neg(&s0, x));
        }
    }

    #[test]
    fn stationary_cases() {
        let s = reference();
        // symmetric point: p(0|+1)/p(0) = 1, so the ratio 0.9 stays below the cap
        assert_abs_diff_eq!(stationary_f(&s, 0.9, 0.0).unwrap(), 0.9, epsilon = 1e-15);
        assert_eq!(stationary_f(&s, 0.995, 0.0).unwrap(), 0.99);
        assert_eq!(stationary_f(&s, 1.0, 2.0).unwrap(), 0.99);
        // at the true prior and small ε the score is the Bayes posterior below the cap
        let x = -0.5;
        let post = 0.5 * density_pos(&s, x) / density_mix(&s, x);
        assert_abs_diff_eq!(stationary_f(&s, 0.5, x).unwrap(), post, epsilon = 1e-14);
        assert!(stationary_f(&s, 0.0, x).is_err());
        // far outside both components p(x) underflows
        let far = MixtureSpec { domain: (-100.0, 100.0), ..s };
        assert_eq!(stationary_f(&far, 0.3, -60.0).unwrap(), 0.99);
    }

    #[test]
    fn pi_max_reference() {
        let s = reference();
        let g = QuadratureGrid::for_spec(&s).unwrap();
        let pm = pi_max(&s, &g).unwrap();
        // brute force on the ratio π + (1-π)e^{-4x}, minimized at x = 10
        let brute = (0..=200_000)
            .map(|i| -10.0 + f64::from(i) * 1e-4)
            .map(|x| 0.5 + 0.5 * (-4.0 * x).exp())
            .fold(f64::INFINITY, f64::min)
            * 0.99;
        assert_abs_diff_eq!(pm.value, brute, epsilon = 1e-15);
        assert_abs_diff_eq!(pm.value, 0.495, epsilon = 1e-15);
        assert!(!pm.grid_too_coarse);
        assert_eq!(pm.argmin, 10.0);

        let e0 = MixtureSpec { epsilon: 0.0, ..s.clone() };
        assert_abs_diff_eq!(pi_max(&e0, &g).unwrap().value, 0.5, epsilon = 1e-15);
        let all_pos = MixtureSpec { true_prior: 1.0, ..s };
        assert_abs_diff_eq!(pi_max(&all_pos, &g).unwrap().value, 0.99, epsilon = 1e-15);
    }

    #[test]
    fn grid_must_cover_domain() {
        let s = reference();
        let g = QuadratureGrid::simpson(-5.0, 5.0, 101).unwrap();
        assert!(pi_max(&s, &g).is_err());
        assert!(population_update(&s, 0.5, &g).is_err());
    }

    #[test]
    fn update_is_fixed_below_pi_max() {
        let s = reference();
        let g = QuadratureGrid::for_spec(&s).unwrap();
        for p in [0.1, 0.3, 0.49] {
            assert_abs_diff_eq!(population_update(&s, p, &g).unwrap(), p, epsilon = 1e-12);
            let gap = lemma2_gap(&s, p, &g).unwrap();
            assert!(gap.below_pi_max);
            assert_eq!(gap.value, 0.0);
        }
    }

    #[test]
    fn update_brackets_and_matches_gap() {
        let s = reference();
        let g = QuadratureGrid::for_spec(&s).unwrap();
        let pm = pi_max(&s, &g).unwrap().value;
        let next = population_update(&s, 0.9, &g).unwrap();
        assert!(pm < next && next < 0.9);
        let gap = lemma2_gap(&s, 0.9, &g).unwrap();
        assert!(!gap.below_pi_max && gap.value > 0.0);
        assert_abs_diff_eq!(0.9 - next, gap.value, epsilon = 1e-6);
    }

    #[test]
    fn gap_is_monotone_in_prior() {
        let s = MixtureSpec { true_prior: 0.2, ..reference() };
        let g = QuadratureGrid::for_spec(&s).unwrap();
        let hi = lemma2_gap(&s, 1.0, &g).unwrap().value;
        let lo = lemma2_gap(&s, 0.6, &g).unwrap().value;
        assert!(hi > lo && lo > 0.0);
    }

    #[test]
    fn fixed_point_start_is_constant() {
        let s = reference();
        let g = QuadratureGrid::for_spec(&s).unwrap();
        let pm = pi_max(&s, &g).unwrap().value;
        let trace = iterate_population(&s, pm, &g, 20, 0.0).unwrap();
        assert!(trace.iter().all(|st| (st.prior - pm).abs() < 1e-12));
        assert!(iterate_population(&s, 0.3, &g, 5, 0.0).is_err());
    }

    #[test]
    fn iteration_decreases_toward_pi_max() {
        let s = reference();
        let g = QuadratureGrid::for_spec(&s).unwrap();
        let pm = pi_max(&s, &g).unwrap().value;
        let trace = iterate_population(&s, 0.9, &g, 40, 0.0).unwrap();
        assert_eq!(trace.len(), 41);
        for st in &trace[..40] {
            assert!(st.gap.unwrap() > 0.0);
            assert_abs_diff_eq!(st.gap.unwrap(), st.lemma2_rhs, epsilon = 1e-6);
            assert!(st.prior >= pm);
        }
        assert!(trace[40].prior - pm < 1e-5);
    }

    #[test]
    fn iteration_stops_on_tolerance() {
        let s = reference();
        let g = QuadratureGrid::for_spec(&s).unwrap();
        let trace = iterate_population(&s, 0.9, &g, 1000, 1e-6).unwrap();
        assert!(trace.len() < 1000);
    }

    #[test]
    fn rate_bound_is_positive() {
        let s = reference();
        let g = QuadratureGrid::for_spec(&s).unwrap();
        let rb = rate_bound(&s, &g).unwrap();
        assert_eq!(rb.x_star, 10.0);
        // max |φ'| = φ(1) for a unit Gaussian
        let phi1 = (-0.5f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert_abs_diff_eq!(rb.lipschitz_pos, phi1, epsilon = 1e-6);
        assert!(rb.constant > 0.0);
    }

    #[test]
    fn lemma3_examples() {
        assert!(lemma3_check(1.0, 1.0, 3).unwrap());
        assert_abs_diff_eq!(lemma3_slack(1.0, 1.0, 3).unwrap(), 0.0);
        assert!(lemma3_check(2.0, 1.0, 1).unwrap());
        // 1/2 - 1/4 = 0.25 against 1 - 1/2 = 0.5, scaled by bⁿ = 1
        assert_abs_diff_eq!(lemma3_slack(2.0, 1.0, 1).unwrap(), 0.25, epsilon = 1e-15);
        assert!(lemma3_check(1.0, 2.0, 1).is_err());
        assert!(lemma3_check(1.0, 0.0, 1).is_err());
        assert!(lemma3_check(2.0, 1.0, 0).is_err());
    }
}
