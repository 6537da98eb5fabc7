//! Metrics, empirical estimators, and theory calculators.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, RiskSpec, Scenario};
use crate::vecops;

/// dB value reported for a zero MSD.
pub const DB_FLOOR: f64 = -200.0;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Network-level metrics of one round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundMetrics {
    pub round: usize,
    /// `‖ψ̃_i‖²` summed over agents.
    pub msd_psi: f64,
    /// `‖w̃_i‖²` summed over agents.
    pub msd_w: f64,
    /// Network average of the normalized type-I error.
    pub v1_bar: f64,
    /// Network average of the normalized type-II error.
    pub v2_bar: f64,
    /// `max_k ‖ψ̃_{k,i}‖`.
    pub max_err_psi: f64,
    /// `max_k ‖w̃_{k,i}‖`.
    pub max_err_w: f64,
}

/// Squared norm of the stacked error vector.
pub fn msd<'a, I>(errors: I) -> f64
where
    I: IntoIterator<Item = &'a [f64]>,
{
    errors.into_iter().map(vecops::norm_sq).sum()
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn to_db(x: f64) -> f64 {
    if x > 0.0 {
        (10.0 * x.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

/// Normalized clustering errors of one agent.
///
/// `believed` and `truth` are the agent's columns of `E_i` and `E°` over the
/// full agent set; `n_k = |N_k|` counts the agent itself.
pub fn normalized_errors(believed: &[bool], truth: &[bool], n_k: usize) -> Result<(f64, f64)> {
    if believed.len() != truth.len() {
        return Err(Error::Dimension {
            expected: truth.len(),
            got: believed.len(),
        });
    }
    if n_k <= 1 {
        return Ok((0.0, 0.0));
    }
    let mut missed = 0usize;
    let mut spurious = 0usize;
    for (&e, &t) in believed.iter().zip(truth) {
        match (e, t) {
            (false, true) => missed += 1,
            (true, false) => spurious += 1,
            _ => {}
        }
    }
    let denom = (n_k - 1) as f64;
    Ok((missed as f64 / denom, spurious as f64 / denom))
}

/// Result of a bound calculator whose validity condition may fail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "value")]
pub enum Bound {
    Value(f64),
    Inapplicable,
}

impl Bound {
    pub fn value(self) -> Option<f64> {
        match self {
            Bound::Value(v) => Some(v),
            Bound::Inapplicable => None,
        }
    }
}

/// Markov-type bounds on the steady-state probabilities of a type-I error
/// (`f < γ` on a same-task link) and a type-II error (`f ≥ γ` on a
/// cross-task link), under i.i.d. Bernoulli proximity tests with success
/// probabilities `p_d` and `p_f` respectively.
pub fn trust_error_bounds(p_d: f64, p_f: f64, nu: f64, gamma: f64) -> (Bound, Bound) {
    let shrink = (1.0 - nu) / (1.0 + nu);
    let p1 = if gamma < p_d && (0.0..=1.0).contains(&p_d) {
        Bound::Value(shrink * p_d * (1.0 - p_d) / (p_d - gamma).powi(2))
    } else {
        Bound::Inapplicable
    };
    let p2 = if gamma > p_f && (0.0..=1.0).contains(&p_f) {
        Bound::Value(shrink * p_f * (1.0 - p_f) / (gamma - p_f).powi(2))
    } else {
        Bound::Inapplicable
    };
    (p1, p2)
}

/// Step-size bound `2τ/(ζ² + β²)` and contraction factor
/// `ξ = 1 - 2μτ + μ²(ζ² + β²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stability {
    pub mu_bound: f64,
    pub xi: f64,
}

pub fn stability_bound(risk: &RiskSpec, mu: f64) -> Stability {
    let tau = risk.strong_convexity;
    let curvature = risk.lipschitz_gradient.powi(2) + risk.noise_beta.powi(2);
    Stability {
        mu_bound: 2.0 * tau / curvature,
        xi: 1.0 - 2.0 * mu * tau + mu * mu * curvature,
    }
}

/// Solve `H Γ + Γ H = R` for symmetric `Γ`, with `H` symmetric positive
/// definite.
pub fn lyapunov_steady_state(h: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = h.nrows();
    if r.nrows() != m || r.ncols() != m {
        return Err(Error::Dimension {
            expected: m,
            got: r.nrows(),
        });
    }
    model::spd_extreme_eigenvalues(h)?;
    // (I ⊗ H + Hᵀ ⊗ I) vec(Γ) = vec(R), column-major vec
    let n = m * m;
    let mut big = DMatrix::<f64>::zeros(n, n);
    for c in 0..m {
        for r_ in 0..m {
            let row = c * m + r_;
            for k in 0..m {
                big[(row, c * m + k)] += h[(r_, k)];
                big[(row, k * m + r_)] += h[(k, c)];
            }
        }
    }
    let rhs = nalgebra::DVector::from_iterator(n, r.iter().copied());
    let lu = big.clone().lu();
    let mut x = lu.solve(&rhs).ok_or(Error::NotPositiveDefinite)?;
    // one step of iterative refinement
    let resid = &rhs - &big * &x;
    if let Some(dx) = lu.solve(&resid) {
        x += dx;
    }
    let gamma = DMatrix::from_column_slice(m, m, x.as_slice());
    Ok((&gamma + gamma.transpose()) * 0.5)
}

/// `‖H Γ + Γ H - R‖_F`.
pub fn lyapunov_residual(h: &DMatrix<f64>, gamma: &DMatrix<f64>, r: &DMatrix<f64>) -> f64 {
    (h * gamma + gamma * h - r).norm()
}

/// Hessian `2 R_u` and steady gradient-noise covariance `4 σ²_v R_u` of the
/// quadratic risk at its minimizer.
pub fn quadratic_hessian_and_noise(spec: &model::AgentDataSpec) -> (DMatrix<f64>, DMatrix<f64>) {
    let ru = spec.covariance_matrix();
    (&ru * 2.0, &ru * (4.0 * spec.noise_variance()))
}

/// A frequency estimate with a 95% Wilson interval and an exact one-sided
/// 95% upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbEstimate {
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub upper_95: f64,
}

impl ProbEstimate {
    pub fn new(successes: u64, trials: u64) -> Option<Self> {
        if trials == 0 || successes > trials {
            return None;
        }
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z95);
        Some(ProbEstimate {
            successes,
            trials,
            p_hat: successes as f64 / trials as f64,
            ci_low,
            ci_high,
            upper_95: one_sided_upper(successes, trials),
        })
    }

    /// The point estimate, or the one-sided upper bound when no events were
    /// observed.
    pub fn reportable(&self) -> f64 {
        if self.successes == 0 {
            self.upper_95
        } else {
            self.p_hat
        }
    }
}

pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Exact (Clopper-Pearson) one-sided 95% upper bound; closed form for zero
/// successes, Wilson with the one-sided quantile otherwise.
pub fn one_sided_upper(successes: u64, trials: u64) -> f64 {
    if successes == 0 {
        1.0 - 0.05f64.powf(1.0 / trials as f64)
    } else {
        wilson_interval(successes, trials, 1.644_853_626_951_472).1
    }
}

/// Counters for the proximity tests and trust decisions observed over a
/// steady-state window.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailCounts {
    pub same_links: u64,
    pub same_b1: u64,
    pub same_f_below: u64,
    pub cross_links: u64,
    pub cross_b1: u64,
    pub cross_f_at_least: u64,
}

impl TailCounts {
    pub fn merge(&mut self, other: &TailCounts) {
        self.same_links += other.same_links;
        self.same_b1 += other.same_b1;
        self.same_f_below += other.same_f_below;
        self.cross_links += other.cross_links;
        self.cross_b1 += other.cross_b1;
        self.cross_f_at_least += other.cross_f_at_least;
    }
}

/// Empirical `P_d`, `P_f`, `P_I`, `P_II`. A field is `None` when no link of
/// the relevant kind was observed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailProbs {
    pub p_d: Option<ProbEstimate>,
    pub p_f: Option<ProbEstimate>,
    /// `1 - P_d`, estimated from the same counts.
    pub miss: Option<ProbEstimate>,
    pub p_i: Option<ProbEstimate>,
    pub p_ii: Option<ProbEstimate>,
}

pub fn estimate_tail_probs(ensemble: &[TailCounts]) -> Result<TailProbs> {
    if ensemble.is_empty() {
        return Err(Error::Empty("ensemble"));
    }
    let mut total = TailCounts::default();
    for c in ensemble {
        total.merge(c);
    }
    if total.same_links == 0 && total.cross_links == 0 {
        return Err(Error::Empty("steady-state window"));
    }
    Ok(TailProbs {
        p_d: ProbEstimate::new(total.same_b1, total.same_links),
        p_f: ProbEstimate::new(total.cross_b1, total.cross_links),
        miss: ProbEstimate::new(total.same_links - total.same_b1, total.same_links),
        p_i: ProbEstimate::new(total.same_f_below, total.same_links),
        p_ii: ProbEstimate::new(total.cross_f_at_least, total.cross_links),
    })
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let mx = mean(xs);
    let my = mean(ys);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Mean and normal-approximation 95% interval of paired differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedDiff {
    pub n: usize,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

pub fn paired_difference(a: &[f64], b: &[f64]) -> Result<PairedDiff> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::Empty("paired sample"));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len();
    let m = mean(&d);
    let half = if n > 1 {
        let var = d.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        Z95 * (var / n as f64).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(PairedDiff {
        n,
        mean: m,
        ci_low: m - half,
        ci_high: m + half,
    })
}

/// Sample covariance (normalized by `n`) of zero-mean-model samples.
pub fn empirical_covariance(samples: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let first = samples.first().ok_or(Error::Empty("sample set"))?;
    let m = first.len();
    let n = samples.len() as f64;
    let mut mu = vec![0.0; m];
    for s in samples {
        for (a, x) in mu.iter_mut().zip(s) {
            *a += x / n;
        }
    }
    let mut cov = DMatrix::<f64>::zeros(m, m);
    for s in samples {
        for r in 0..m {
            for c in 0..m {
                cov[(r, c)] += (s[r] - mu[r]) * (s[c] - mu[c]) / n;
            }
        }
    }
    Ok(cov)
}

/// Per-agent theory quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentTheory {
    pub agent: usize,
    pub step_size: f64,
    pub tau: f64,
    pub zeta: f64,
    /// Bound and contraction with β = 0.
    pub noise_free: Stability,
    /// Bound and contraction with the configured β.
    pub with_beta: Stability,
    pub beta: f64,
    /// Γ from `H Γ + Γ H = R`, row-major rows.
    pub gamma_lyap: Vec<Vec<f64>>,
    /// `μ tr(Γ)`, the predicted stand-alone steady MSD.
    pub predicted_msd: f64,
}

/// Theory bundle for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub agents: Vec<AgentTheory>,
    pub p_d: f64,
    pub p_f: f64,
    pub nu: f64,
    pub gamma: f64,
    pub p1_bound: Bound,
    pub p2_bound: Bound,
}

pub fn theory_report(scenario: &Scenario, beta: f64, p_d: f64, p_f: f64) -> Result<TheoryReport> {
    let hyper = &scenario.hyper;
    let agents = scenario
        .profiles
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            let risk = model::compute_risk_constants(spec)?;
            let mu = hyper.step_sizes[k];
            let with = RiskSpec {
                noise_beta: beta,
                ..risk
            };
            let (h, r) = quadratic_hessian_and_noise(spec);
            let g = lyapunov_steady_state(&h, &r)?;
            Ok(AgentTheory {
                agent: k,
                step_size: mu,
                tau: risk.strong_convexity,
                zeta: risk.lipschitz_gradient,
                noise_free: stability_bound(&risk, mu),
                with_beta: stability_bound(&with, mu),
                beta,
                gamma_lyap: (0..g.nrows())
                    .map(|r| (0..g.ncols()).map(|c| g[(r, c)]).collect())
                    .collect(),
                predicted_msd: mu * g.trace(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (p1_bound, p2_bound) = trust_error_bounds(p_d, p_f, hyper.nu, hyper.gamma);
    Ok(TheoryReport {
        agents,
        p_d,
        p_f,
        nu: hyper.nu,
        gamma: hyper.gamma,
        p1_bound,
        p2_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(rng: &mut ChaCha8Rng, m: usize) -> DMatrix<f64> {
        let a = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
        &a * a.transpose() + DMatrix::identity(m, m) * 0.1
    }

    #[test]
    fn msd_examples() {
        assert_eq!(msd([[0.0, 0.0].as_slice()]), 0.0);
        assert_eq!(to_db(0.0), DB_FLOOR);
        assert_eq!(msd([[3.0, 4.0].as_slice()]), 25.0);
        assert!((to_db(25.0) - 13.979_400_086_720_377).abs() < 1e-12);
        assert_eq!(mean(&[1.0, 3.0]), 2.0);
    }

    #[test]
    fn normalized_error_examples() {
        let t = [true, true, true];
        assert_eq!(normalized_errors(&t, &t, 3).unwrap(), (0.0, 0.0));
        // E° column with three ones, E_i only self
        let (v1, v2) = normalized_errors(&[true, false, false], &[true, true, true], 3).unwrap();
        assert_eq!((v1, v2), (1.0, 0.0));
        // E_i keeps all four links, E° only self
        let (v1, v2) =
            normalized_errors(&[true, true, true, true], &[true, false, false, false], 4).unwrap();
        assert_eq!((v1, v2), (0.0, 1.0));
        assert_eq!(normalized_errors(&[true], &[true], 1).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn trust_bound_examples() {
        assert_eq!(trust_error_bounds(1.0, 0.0, 0.98, 0.5).0, Bound::Value(0.0));
        let b = trust_error_bounds(0.99, 0.01, 0.98, 0.5).0.value().unwrap();
        let expected = (0.02 / 1.98) * (0.99 * 0.01) / (0.49 * 0.49);
        assert!((b - expected).abs() < 1e-15);
        assert!((b - 4.165e-4).abs() < 1e-6);
        assert_eq!(
            trust_error_bounds(0.4, 0.6, 0.98, 0.5),
            (Bound::Inapplicable, Bound::Inapplicable)
        );
        let loose = trust_error_bounds(0.9, 0.1, 0.9, 0.5);
        let tight = trust_error_bounds(0.9, 0.1, 0.999, 0.5);
        assert!(tight.0.value().unwrap() < loose.0.value().unwrap());
        assert!(tight.1.value().unwrap() < loose.1.value().unwrap());
    }

    #[test]
    fn stability_examples() {
        let risk = RiskSpec {
            strong_convexity: 2.0,
            lipschitz_gradient: 2.0,
            hessian_lipschitz: 0.0,
            noise_beta: 0.0,
        };
        let s = stability_bound(&risk, 0.05);
        assert!((s.mu_bound - 1.0).abs() < 1e-15);
        assert!((s.xi - 0.81).abs() < 1e-12);
        assert_eq!(stability_bound(&risk, 0.0).xi, 1.0);
        assert!((stability_bound(&risk, 1.0).xi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lyapunov_scalar_and_analytic_cases() {
        let g = lyapunov_steady_state(&DMatrix::identity(2, 2), &(DMatrix::identity(2, 2) * 2.0))
            .unwrap();
        assert!((g - DMatrix::<f64>::identity(2, 2)).norm() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for m in 1..5 {
            let ru = random_spd(&mut rng, m);
            let s2 = 0.007;
            let g = lyapunov_steady_state(&(&ru * 2.0), &(&ru * (4.0 * s2))).unwrap();
            assert!((g - DMatrix::<f64>::identity(m, m) * s2).norm() < 1e-10);
        }
    }

    #[test]
    fn lyapunov_residual_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let m = rng.random_range(1..6);
            let h = random_spd(&mut rng, m);
            let b = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
            let r = &b * b.transpose();
            let g = lyapunov_steady_state(&h, &r).unwrap();
            assert!(lyapunov_residual(&h, &g, &r) <= 1e-10);
            assert!((&g - g.transpose()).norm() < 1e-14);
        }
    }

    #[test]
    fn lyapunov_rejects_indefinite_h() {
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(lyapunov_steady_state(&h, &DMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn wilson_covers_bernoulli_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut covered = 0;
        for trial in 0..200 {
            let p = 0.05 + 0.9 * (trial as f64 / 200.0);
            let n = 500;
            let s = (0..n).filter(|_| rng.random_bool(p)).count() as u64;
            let e = ProbEstimate::new(s, n).unwrap();
            if e.ci_low <= p && p <= e.ci_high {
                covered += 1;
            }
        }
        assert!(covered >= 180, "coverage {covered}/200");
    }

    #[test]
    fn zero_count_upper_bound() {
        let e = ProbEstimate::new(0, 1000).unwrap();
        assert_eq!(e.p_hat, 0.0);
        assert!((e.upper_95 - (1.0 - 0.05f64.powf(1e-3))).abs() < 1e-15);
        assert!(e.upper_95 < 3.0 / 1000.0 + 1e-4);
        assert_eq!(e.reportable(), e.upper_95);
        assert!(ProbEstimate::new(0, 0).is_none());
    }

    #[test]
    fn empty_ensemble_rejected() {
        assert!(estimate_tail_probs(&[]).is_err());
        assert!(estimate_tail_probs(&[TailCounts::default()]).is_err());
    }

    #[test]
    fn slope_and_paired_diff() {
        assert!((fit_slope(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 2.0).abs() < 1e-15);
        assert!(fit_slope(&[1.0], &[1.0]).is_none());
        let d = paired_difference(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]).unwrap();
        assert!((d.mean - 1.0).abs() < 1e-15 && d.ci_low < 1.0 && d.ci_high > 1.0);
    }
}
