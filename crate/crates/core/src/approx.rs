//! Uniform approximations Z_κ(ρ, x) and A_κ(ρ, x) of P(W > x), plus the
//! classical heavy-tail and heavy-traffic approximations.
//!
//! Everything is carried as a natural log. The Gaussian term of Z uses the
//! cut-off T = ω₁⁻¹(x)/√x when κ = 2 and T = √(log x) when κ > 2, so the two
//! regimes are not continuous in the model parameters at the κ boundary.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::cramer_poly::LambdaPoly;
use crate::error::{check_positive, check_rho, Error, Result};
use crate::model::QueueModel;
use crate::quad::{integrate_log, Tolerance};
use crate::special::{ln_norm_cdf, LogSum};
use crate::thresholds::{Region, ThresholdSet};

const SUM_REL_CUTOFF: f64 = 1e-12;
/// Terms of the heavy sum added one by one before switching to a smooth approximation.
const EXACT_TERMS: u64 = 100_000;

/// How the heavy-tail sum Σ_{n=1}^{K} (1-ρ)ρⁿ n F̄(x - nμ) is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeavySumMode {
    /// Term by term, stopping once the geometric remainder is negligible.
    #[default]
    Exact,
    /// F̄(x) (1-ρ) Σ_{n=1}^{K} nρⁿ in closed form.
    Simplified,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Flags {
    /// Λ'_ρ had no usable positive root; w(ρ, x) fell back to ω₁⁻¹(x)/x.
    pub u_fallback: bool,
    /// ρ/(1-ρ) F̄(x) ≥ 1, so the heavy-tail asymptotic is not a probability.
    pub heavy_tail_invalid: bool,
}

impl std::fmt::Display for Flags {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if self.u_fallback {
            parts.push("u_fallback");
        }
        if self.heavy_tail_invalid {
            parts.push("heavy_tail_invalid");
        }
        if parts.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&parts.join(";"))
        }
    }
}

/// Logs of the individual pieces of Z and A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Terms {
    pub log_heavy_sum: f64,
    /// Only present for κ > 2.
    pub log_middle_sum: Option<f64>,
    pub log_gaussian: f64,
    /// (x/μ) Λ_ρ(w).
    pub log_lambda: f64,
    pub w: f64,
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproximationReport {
    pub rho: f64,
    pub x: f64,
    pub log_z: f64,
    pub log_a: f64,
    pub log_heavy_tail: f64,
    pub log_heavy_traffic: f64,
    pub region: Region,
    pub terms: Terms,
}

/// Evaluates every approximation for one queue model.
#[derive(Debug, Clone)]
pub struct Approximator<'a> {
    pub qm: &'a QueueModel,
    pub poly: LambdaPoly,
    pub mode: HeavySumMode,
}

impl<'a> Approximator<'a> {
    pub fn new(qm: &'a QueueModel) -> Self {
        Self {
            qm,
            poly: LambdaPoly::new(qm),
            mode: HeavySumMode::Exact,
        }
    }

    pub fn with_mode(mut self, mode: HeavySumMode) -> Self {
        self.mode = mode;
        self
    }

    fn thresholds(&self) -> ThresholdSet<'a> {
        ThresholdSet::new(self.qm)
    }

    /// log Σ_{n=1}^{K_r(x)} (1-ρ)ρⁿ n F̄(x - nμ).
    pub fn heavy_sum(&self, rho: f64, x: f64) -> Result<f64> {
        check_rho(rho)?;
        check_positive("x", x)?;
        let k = self.thresholds().k_r(x)?;
        heavy_sum(self.qm, rho, x, k, self.mode)
    }

    /// log E[ρ^{a(x,Z)} 1(Z ≤ T)] in closed form.
    pub fn gauss_geom_expectation(&self, rho: f64, x: f64, t: f64) -> Result<f64> {
        gauss_geom_expectation(self.qm, rho, x, t)
    }

    /// log of the Cramér middle sum over M(x) < n ≤ N(x); `None` for κ = 2.
    pub fn middle_sum(&self, rho: f64, x: f64) -> Result<Option<f64>> {
        check_rho(rho)?;
        check_positive("x", x)?;
        if self.qm.kappa == 2 {
            return Ok(None);
        }
        let ts = self.thresholds();
        let (m, n_max) = (ts.m(x)?, ts.n(x));
        let qm = self.qm;
        let sigma = qm.sigma();
        let log_rho = rho.ln();
        let log_1m = (-rho).ln_1p();
        let term = |nf: f64| {
            let gap = x - nf * qm.mu;
            log_1m + nf * log_rho + nf * self.poly.q_kappa(gap / (sigma * nf)) - gap.ln()
        };
        let mut acc = LogSum::new();
        // N(x) keeps x - nμ ≥ √(x log x) > 0 on the whole range
        let head = n_max.min(m.saturating_add(EXACT_TERMS));
        for n in (m + 1)..=head {
            acc.add(term(n as f64));
        }
        if n_max > head {
            acc.add(log_smooth_sum(term, head as f64, n_max as f64)?);
        }
        let pref = (sigma * x.sqrt() / (2.0 * PI * qm.mu).sqrt()).ln();
        Ok(Some(pref + acc.ln()))
    }

    fn gaussian_cutoff(&self, x: f64) -> Result<f64> {
        if self.qm.kappa == 2 {
            Ok(self.thresholds().omega1_inv(x)? / x.sqrt())
        } else {
            Ok(x.ln().max(0.0).sqrt())
        }
    }

    /// Both Z and A plus the classical approximations at one (ρ, x).
    pub fn report(&self, rho: f64, x: f64) -> Result<ApproximationReport> {
        check_rho(rho)?;
        check_positive("x", x)?;
        let ts = self.thresholds();
        let qm = self.qm;
        let k = ts.k_r(x)?;
        let log_heavy_sum = heavy_sum(qm, rho, x, k, self.mode)?;
        let log_middle_sum = self.middle_sum(rho, x)?;
        let log_gaussian = gauss_geom_expectation(qm, rho, x, self.gaussian_cutoff(x)?)?;

        let log_rho = rho.ln();
        let cap = ts.omega1_inv(x)? / x;
        let mut flags = Flags::default();
        let w = match self.poly.u_star_log(log_rho) {
            Ok(u) => u.min(cap),
            Err(Error::NoPositiveRoot { .. }) => {
                flags.u_fallback = true;
                cap
            }
            Err(e) => return Err(e),
        };
        let log_lambda = x / qm.mu * self.poly.lambda_log(log_rho, w);

        let mut z = LogSum::new();
        z.add(log_heavy_sum);
        z.add(log_gaussian);
        if let Some(m) = log_middle_sum {
            z.add(m);
        }
        let mut a = LogSum::new();
        a.add(log_heavy_sum);
        a.add(log_lambda);

        let log_heavy_tail = heavy_tail(qm, rho, x)?;
        flags.heavy_tail_invalid = log_heavy_tail >= 0.0;
        Ok(ApproximationReport {
            rho,
            x,
            log_z: z.ln(),
            log_a: a.ln(),
            log_heavy_tail,
            log_heavy_traffic: heavy_traffic(qm, rho, x)?,
            region: ts.region(rho, x)?,
            terms: Terms {
                log_heavy_sum,
                log_middle_sum,
                log_gaussian,
                log_lambda,
                w,
                flags,
            },
        })
    }

    pub fn z_kappa(&self, rho: f64, x: f64) -> Result<f64> {
        Ok(self.report(rho, x)?.log_z)
    }

    pub fn a_kappa(&self, rho: f64, x: f64) -> Result<f64> {
        Ok(self.report(rho, x)?.log_a)
    }
}

/// log of ρ^{x/μ} e^{σ²(log ρ)² x/(2μ³)} Φ(√μ T/σ + σ√x log ρ/μ^{3/2}).
/// `t` may be ±∞.
pub fn gauss_geom_expectation(qm: &QueueModel, rho: f64, x: f64, t: f64) -> Result<f64> {
    check_rho(rho)?;
    check_positive("x", x)?;
    let (mu, sigma) = (qm.mu, qm.sigma());
    let lr = rho.ln();
    let arg = if t.is_infinite() {
        t
    } else {
        mu.sqrt() * t / sigma + sigma * x.sqrt() * lr / mu.powf(1.5)
    };
    let phi = ln_norm_cdf(arg);
    if phi == f64::NEG_INFINITY {
        return Ok(phi);
    }
    Ok(x / mu * lr + sigma * sigma * lr * lr * x / (2.0 * mu.powi(3)) + phi)
}

pub(crate) fn heavy_sum(
    qm: &QueueModel,
    rho: f64,
    x: f64,
    k: u64,
    mode: HeavySumMode,
) -> Result<f64> {
    heavy_sum_split(qm, rho, x, k, mode, EXACT_TERMS)
}

fn heavy_sum_split(
    qm: &QueueModel,
    rho: f64,
    x: f64,
    k: u64,
    mode: HeavySumMode,
    exact_terms: u64,
) -> Result<f64> {
    if k == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    let log_rho = rho.ln();
    let log_1m = (-rho).ln_1p();
    match mode {
        HeavySumMode::Simplified => {
            // Σ_{n=1}^{K} nρⁿ = Σ_{n≥1} nρⁿ - Σ_{n>K} nρⁿ
            let total = log_rho - 2.0 * log_1m;
            let tail = log_weighted_geometric_tail(log_rho, log_1m, k);
            let partial = total + (-(tail - total).exp()).ln_1p();
            Ok(log_1m + partial + qm.dist.log_tail(x))
        }
        HeavySumMode::Exact => {
            let term = |nf: f64| log_1m + nf * log_rho + nf.ln() + qm.dist.log_tail(x - nf * qm.mu);
            let log_tail_cap = qm.dist.log_tail(x - k as f64 * qm.mu);
            let head = k.min(exact_terms);
            let mut acc = LogSum::new();
            for n in 1..=head {
                acc.add(term(n as f64));
                if n < k {
                    let bound =
                        log_1m + log_tail_cap + log_weighted_geometric_tail(log_rho, log_1m, n);
                    if bound < acc.ln() + SUM_REL_CUTOFF.ln() {
                        return Ok(acc.ln());
                    }
                }
            }
            if k > head {
                acc.add(log_smooth_sum(term, head as f64, k as f64)?);
            }
            Ok(acc.ln())
        }
    }
}

/// log Σ_{a<n≤b} e^{f(n)} by Euler-Maclaurin: ∫_a^b e^f + (e^{f(b)} - e^{f(a)})/2.
/// Segments are log-spaced from a and from b so both ends are resolved.
fn log_smooth_sum<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    let mut cuts = vec![a, b];
    let mut step = 10.0;
    while step < b - a {
        cuts.push(a + step);
        cuts.push(b - step);
        step *= 10.0;
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut acc = LogSum::new();
    for w in cuts.windows(2) {
        // far segments sit where f - max(f) is pure rounding noise
        let probe = (0..=16)
            .map(|i| f(w[0] + (w[1] - w[0]) * i as f64 / 16.0))
            .fold(f64::NEG_INFINITY, f64::max);
        if probe + (w[1] - w[0]).ln() < acc.ln() + SUM_REL_CUTOFF.ln() {
            continue;
        }
        // f carries about |f|ε of rounding, which bounds attainable accuracy
        let tol = (16.0 * f64::EPSILON * probe.abs()).max(1e-10);
        acc.add(integrate_log(&f, w[0], w[1], Tolerance::rel(tol))?);
    }
    let (fa, fb) = (f(a), f(b));
    let top = acc.ln().max(fa).max(fb);
    let v = (acc.ln() - top).exp() + 0.5 * ((fb - top).exp() - (fa - top).exp());
    Ok(top + v.ln())
}

/// log Σ_{m>n} mρ^m = log(ρ^{n+1}((n+1) - nρ)/(1-ρ)²).
fn log_weighted_geometric_tail(log_rho: f64, log_1m: f64, n: u64) -> f64 {
    let nf = n as f64;
    let rho = log_rho.exp();
    (nf + 1.0) * log_rho + (1.0 + nf * (1.0 - rho)).ln() - 2.0 * log_1m
}

/// log(ρ/(1-ρ) F̄(x)).
pub fn heavy_tail(qm: &QueueModel, rho: f64, x: f64) -> Result<f64> {
    check_rho(rho)?;
    check_positive("x", x)?;
    Ok(rho.ln() - (-rho).ln_1p() + qm.dist.log_tail(x))
}

/// log of e^{-x(1-ρ)/μ}.
pub fn heavy_traffic(qm: &QueueModel, rho: f64, x: f64) -> Result<f64> {
    check_rho(rho)?;
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain {
            name: "x",
            value: x,
            domain: "[0, inf)",
        });
    }
    Ok(-x * (1.0 - rho) / qm.mu)
}

pub fn approximate(qm: &QueueModel, rho: f64, x: f64) -> Result<ApproximationReport> {
    Approximator::new(qm).report(rho, x)
}

/// log Z_κ(ρ, x).
pub fn z_kappa(qm: &QueueModel, rho: f64, x: f64) -> Result<f64> {
    Approximator::new(qm).z_kappa(rho, x)
}

/// log A_κ(ρ, x).
pub fn a_kappa(qm: &QueueModel, rho: f64, x: f64) -> Result<f64> {
    Approximator::new(qm).a_kappa(rho, x)
}

/// Reports for every (ρ, x) pair, ρ-major. Pairs are evaluated in parallel
/// on the current rayon pool; a failing pair does not abort the grid.
pub fn evaluate_grid(
    qm: &QueueModel,
    rho_list: &[f64],
    x_list: &[f64],
) -> Vec<Result<ApproximationReport>> {
    evaluate_grid_with(&Approximator::new(qm), rho_list, x_list)
}

pub fn evaluate_grid_with(
    ap: &Approximator<'_>,
    rho_list: &[f64],
    x_list: &[f64],
) -> Vec<Result<ApproximationReport>> {
    let pairs: Vec<(f64, f64)> = rho_list
        .iter()
        .flat_map(|&r| x_list.iter().map(move |&x| (r, x)))
        .collect();
    pairs.par_iter().map(|&(r, x)| ap.report(r, x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::IntegratedTailModel;

    fn unit_model() -> QueueModel {
        let mut qm = QueueModel::new(IntegratedTailModel::pareto(3.0, 1.0).unwrap()).unwrap();
        qm.mu = 1.0;
        qm.sigma2 = 1.0;
        qm
    }

    #[test]
    fn gaussian_closed_form() {
        let qm = unit_model();
        let rho = (-0.1f64).exp();
        let v = gauss_geom_expectation(&qm, rho, 100.0, f64::INFINITY).unwrap();
        assert!((v + 9.5).abs() < 1e-12);
        let v = gauss_geom_expectation(&qm, rho, 100.0, f64::NEG_INFINITY).unwrap();
        assert_eq!(v, f64::NEG_INFINITY);
        let v = gauss_geom_expectation(&qm, 1.0 - 1e-12, 3.0, f64::INFINITY).unwrap();
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn classical_approximations() {
        let qm = QueueModel::new(IntegratedTailModel::weibull(0.5, 1.0).unwrap()).unwrap();
        assert!((heavy_tail(&qm, 0.5, 4.0).unwrap() + 2.0).abs() < 1e-14);
        assert!((heavy_traffic(&qm, 0.9, 20.0).unwrap() + 1.0).abs() < 1e-14);
        assert_eq!(heavy_traffic(&qm, 0.9, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn empty_heavy_sum_leaves_gaussian_term() {
        let qm = QueueModel::new(IntegratedTailModel::pareto(3.0, 1.0).unwrap()).unwrap();
        let ap = Approximator::new(&qm);
        let rep = ap.report(0.5, 50.0).unwrap();
        assert_eq!(rep.terms.log_heavy_sum, f64::NEG_INFINITY);
        assert_eq!(rep.log_z, rep.terms.log_gaussian);
        assert!(rep.terms.log_middle_sum.is_none());
    }

    #[test]
    fn early_termination_matches_full_sum() {
        let qm = QueueModel::new(IntegratedTailModel::pareto(3.0, 1.0).unwrap()).unwrap();
        let x = 2000.0;
        let k = ThresholdSet::new(&qm).k_r(x).unwrap();
        assert!(k > 100);
        for &rho in &[0.2, 0.7] {
            let fast = heavy_sum(&qm, rho, x, k, HeavySumMode::Exact).unwrap();
            let full: LogSum = (1..=k)
                .map(|n| {
                    let nf = n as f64;
                    (1.0 - rho).ln() + nf * rho.ln() + nf.ln() + qm.dist.log_tail(x - nf * qm.mu)
                })
                .collect();
            assert!((fast - full.ln()).abs() < 1e-11, "rho={rho}");
        }
    }

    #[test]
    fn smooth_remainder_matches_full_sum() {
        let qm = QueueModel::new(IntegratedTailModel::pareto(3.0, 1.0).unwrap()).unwrap();
        let x = 1e5;
        let k = ThresholdSet::new(&qm).k_r(x).unwrap();
        assert!(k > 10_000);
        for &rho in &[0.9999, 0.99999] {
            let split = heavy_sum_split(&qm, rho, x, k, HeavySumMode::Exact, 1000).unwrap();
            let full: LogSum = (1..=k)
                .map(|n| {
                    let nf = n as f64;
                    (1.0 - rho).ln() + nf * rho.ln() + nf.ln() + qm.dist.log_tail(x - nf * qm.mu)
                })
                .collect();
            assert!((split - full.ln()).abs() < 1e-8, "rho={rho}: {split} vs {}", full.ln());
        }
    }

    #[test]
    fn simplified_sum_closed_form() {
        let qm = QueueModel::new(IntegratedTailModel::pareto(3.0, 1.0).unwrap()).unwrap();
        let (rho, x, k) = (0.6f64, 500.0, 40u64);
        let direct: f64 = (1..=k).map(|n| n as f64 * rho.powi(n as i32)).sum();
        let expect = (1.0 - rho).ln() + direct.ln() + qm.dist.log_tail(x);
        let got = heavy_sum(&qm, rho, x, k, HeavySumMode::Simplified).unwrap();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn kappa2_lambda_term_closed_form() {
        let qm = QueueModel::new(IntegratedTailModel::lognormal(0.0, 1.0).unwrap()).unwrap();
        let ap = Approximator::new(&qm);
        let (rho, x) = (0.999f64, 30.0);
        let rep = ap.report(rho, x).unwrap();
        let u = ap.poly.u_star(rho).unwrap();
        assert!(rep.terms.w <= u);
        if rep.terms.w == u {
            let lr = rho.ln();
            let expect = x / qm.mu * (lr + qm.sigma2 * lr * lr / (2.0 * qm.mu * qm.mu));
            assert!((rep.terms.log_lambda - expect).abs() < 1e-12 * expect.abs());
        }
    }

    #[test]
    fn weibull_middle_sum_is_present() {
        let qm = QueueModel::new(IntegratedTailModel::weibull(0.5, 1.0).unwrap()).unwrap();
        let rep = Approximator::new(&qm).report(0.9, 50.0).unwrap();
        assert!(rep.terms.log_middle_sum.is_some());
        assert!(rep.log_z < 0.0 && rep.log_z.is_finite());
        assert!(rep.terms.log_gaussian.is_finite());
    }

    #[test]
    fn grid_is_ordered_and_pure() {
        let qm = QueueModel::new(IntegratedTailModel::pareto(3.0, 1.0).unwrap()).unwrap();
        let xs = [5.0, 50.0, 500.0];
        let out = evaluate_grid(&qm, &[0.5, 0.9], &xs);
        assert_eq!(out.len(), 6);
        let single = approximate(&qm, 0.9, 50.0).unwrap();
        assert_eq!(out[4].as_ref().unwrap(), &single);
        let bad = evaluate_grid(&qm, &[1.5, 0.5], &[10.0]);
        assert!(bad[0].is_err() && bad[1].is_ok());
    }

    #[test]
    fn flags_render() {
        assert_eq!(Flags::default().to_string(), "none");
        let f = Flags {
            u_fallback: true,
            heavy_tail_invalid: true,
        };
        assert_eq!(f.to_string(), "u_fallback;heavy_tail_invalid");
    }
}
