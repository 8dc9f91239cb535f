//! Uniform approximations of P(S_n > x) for the random walk with increments
//! X ~ F, and the intermediate queue approximation S_κ(ρ, x) built on them.
//!
//! With y = (x - nμ)/σ, the big-jump branch nF̄(x - nμ) covers n ≤ K_r(x).
//! Beyond that B_κ(x, n) mixes the Gaussian/Cramér term π̂_κ and the
//! intermediate-domain integral J, gated by y relative to C_n.
//!
//! For n = 1 the big-jump branch returns F̄(x - μ) rather than the exact
//! F̄(x); the O(μ) shift is part of the asymptotic form.

use std::f64::consts::PI;

use serde::Serialize;

use crate::approx::{heavy_sum, HeavySumMode};
use crate::cramer_poly::q_kappa;
use crate::error::{check_positive, check_rho, Error, Result};
use crate::model::QueueModel;
use crate::quad::{golden_min, integrate_log, Tolerance};
use crate::special::{ln_norm_cdf, LogSum};
use crate::thresholds::ThresholdSet;

pub const DEFAULT_EPS: f64 = 0.1;

const PRESCAN_POINTS: usize = 240;
const GOLDEN_TOL: f64 = 1e-8;
const J_TOL: f64 = 1e-6;
/// Lower z cut-off of the Gaussian-kernel integral in J.
const KERNEL_FLOOR: f64 = -40.0;
const SUM_REL_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    BigJump,
    Bkappa,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::BigJump => "big_jump",
            Branch::Bkappa => "b_kappa",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RwTail {
    pub branch: Branch,
    pub log_value: f64,
}

/// Minimizer and minimum of h(t) = t/2 + n(Q̃(t) ∨ 1)/t over t ≥ √n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CnSolution {
    pub value: f64,
    pub argmin: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RwApprox<'a> {
    pub qm: &'a QueueModel,
    pub eps: f64,
}

impl<'a> RwApprox<'a> {
    pub fn new(qm: &'a QueueModel) -> Self {
        Self {
            qm,
            eps: DEFAULT_EPS,
        }
    }

    pub fn with_eps(qm: &'a QueueModel, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: eps,
                reason: "eps must lie in (0, 1)",
            });
        }
        Ok(Self { qm, eps })
    }

    fn ts(&self) -> ThresholdSet<'a> {
        ThresholdSet::new(self.qm)
    }

    fn y(&self, x: f64, n: u64) -> f64 {
        (x - n as f64 * self.qm.mu) / self.qm.sigma()
    }

    /// log π̂_κ(x, n).
    pub fn hat_pi(&self, x: f64, n: u64) -> Result<f64> {
        check_n(n)?;
        check_positive("x", x)?;
        let y = self.y(x, n);
        let mu = self.qm.mu;
        let gaussian = ln_norm_cdf(-y / (x / mu).sqrt());
        if self.qm.kappa == 2 || n > self.ts().n(x) {
            return Ok(gaussian);
        }
        if y <= 0.0 {
            return Err(Error::Domain {
                name: "y",
                value: y,
                domain: "(0, inf) when n <= N(x)",
            });
        }
        let nf = n as f64;
        Ok((x.sqrt() / (y * (2.0 * PI * mu).sqrt())).ln()
            + nf * q_kappa(&self.qm.lambda, y / nf))
    }

    fn h(&self, n: f64, t: f64) -> f64 {
        t / 2.0 + n * self.ts().q_tilde(t).max(1.0) / t
    }

    /// C_n = min_{t ≥ √n} h(t) with its minimizer.
    pub fn c_n_solution(&self, n: u64) -> Result<CnSolution> {
        check_n(n)?;
        let nf = n as f64;
        let lo = nf.sqrt();
        let hi = (4.0 * self.ts().b_inv(4.0 * nf)?).max(2.0 * lo);
        // log-spaced prescan, then golden section around the best point
        let ratio = (hi / lo).powf(1.0 / PRESCAN_POINTS as f64);
        let grid: Vec<f64> = (0..=PRESCAN_POINTS)
            .map(|i| lo * ratio.powi(i as i32))
            .collect();
        let (best, _) = grid
            .iter()
            .enumerate()
            .map(|(i, &t)| (i, self.h(nf, t)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(Error::Minimization("empty prescan"))?;
        let (argmin, value) = golden_min(
            |t| self.h(nf, t),
            grid[best.saturating_sub(1)],
            grid[(best + 1).min(PRESCAN_POINTS)],
            GOLDEN_TOL,
        );
        let mut sol = CnSolution { value, argmin };
        let at_lo = self.h(nf, lo);
        if at_lo < sol.value {
            sol = CnSolution {
                value: at_lo,
                argmin: lo,
            };
        }
        if !sol.value.is_finite() {
            return Err(Error::Minimization("C_n is not finite"));
        }
        Ok(sol)
    }

    pub fn c_n(&self, n: u64) -> Result<f64> {
        Ok(self.c_n_solution(n)?.value)
    }

    /// Bracket [b⁻¹(2(1-s)n), b⁻¹(2n)] for C_n with s = r̃ + 0.1, where r̃ is
    /// the largest local index t q̃(t)/Q̃(t) seen on the minimization range
    /// (restricted to Q̃ > 1, where the clamp is inactive).
    pub fn c_n_bracket(&self, n: u64) -> Result<(f64, f64)> {
        check_n(n)?;
        let nf = n as f64;
        let ts = self.ts();
        let lo = nf.sqrt();
        let hi = (4.0 * ts.b_inv(4.0 * nf)?).max(2.0 * lo);
        let ratio = (hi / lo).powf(1.0 / PRESCAN_POINTS as f64);
        let r_tilde = (0..=PRESCAN_POINTS)
            .map(|i| lo * ratio.powi(i as i32))
            .filter_map(|t| {
                let qt = ts.q_tilde(t);
                (qt > 1.0).then(|| t * ts.q_tilde_rate(t) / qt)
            })
            .fold(0.0f64, f64::max);
        let s = r_tilde + 0.1;
        let lower = if s >= 1.0 {
            0.0
        } else {
            ts.b_inv(2.0 * (1.0 - s) * nf)?
        };
        Ok((lower, ts.b_inv(2.0 * nf)?))
    }

    /// log J(y, n). V̄(t) = F̄(σt + μ); both integrals are taken in the
    /// kernel variable z = (y - t)/√n.
    pub fn j_integral(&self, y: f64, n: u64) -> Result<f64> {
        check_n(n)?;
        let nf = n as f64;
        let sn = nf.sqrt();
        let (mu, sigma) = (self.qm.mu, self.qm.sigma());
        let log_vbar = |t: f64| self.qm.dist.log_tail(sigma * t + mu);
        let tol = Tolerance::rel(J_TOL);

        // n ∫_{-∞}^{1} V̄(y - z√n) φ(z) dz
        let first = integrate_log(
            |z| log_vbar(y - z * sn) + crate::special::ln_norm_pdf(z),
            KERNEL_FLOOR,
            1.0,
            tol,
        )?;

        // n/√(2π) ∫_{1}^{z_max} V̄(y - z√n) e^{nQ_κ(z/√n)} dz
        let lower_t = sn.max(y - self.ts().b_inv(2.0 * (1.0 + self.eps) * nf)?);
        let z_max = (y - lower_t) / sn;
        let lambda = &self.qm.lambda;
        let second = integrate_log(
            |z| log_vbar(y - z * sn) + nf * q_kappa(lambda, z / sn),
            1.0,
            z_max,
            tol,
        )?;

        let mut acc = LogSum::new();
        acc.add(first);
        acc.add(second - 0.5 * (2.0 * PI).ln());
        Ok(nf.ln() + acc.ln())
    }

    /// log B_κ(x, n).
    pub fn b_kappa(&self, x: f64, n: u64) -> Result<f64> {
        check_n(n)?;
        let y = self.y(x, n);
        let (pi_on, j_on) = self.gates(y, n)?;
        let mut acc = LogSum::new();
        if pi_on {
            acc.add(self.hat_pi(x, n)?);
        }
        if j_on {
            acc.add(self.j_integral(y, n)?);
        }
        Ok(acc.ln())
    }

    /// Indicators 1(y ≤ (1+ε)C_n) and 1(y ≥ (1-ε)C_n). C_n > 0, so y ≤ 0
    /// settles both without computing it.
    fn gates(&self, y: f64, n: u64) -> Result<(bool, bool)> {
        if y <= 0.0 {
            return Ok((true, false));
        }
        let c = self.c_n(n)?;
        Ok((y <= (1.0 + self.eps) * c, y >= (1.0 - self.eps) * c))
    }

    /// log P(S_n > x) approximation: big-jump branch for n ≤ K_r(x),
    /// B_κ otherwise.
    pub fn rw_tail(&self, x: f64, n: u64) -> Result<RwTail> {
        check_n(n)?;
        check_positive("x", x)?;
        let nf = n as f64;
        if n <= self.ts().k_r(x)? {
            Ok(RwTail {
                branch: Branch::BigJump,
                log_value: nf.ln() + self.qm.dist.log_tail(x - nf * self.qm.mu),
            })
        } else {
            Ok(RwTail {
                branch: Branch::Bkappa,
                log_value: self.b_kappa(x, n)?,
            })
        }
    }

    /// log S_κ(ρ, x). Terms are summed one by one up to n ≈ x/μ, so the cost
    /// grows linearly in x.
    pub fn s_kappa(&self, rho: f64, x: f64) -> Result<f64> {
        check_rho(rho)?;
        check_positive("x", x)?;
        let k = self.ts().k_r(x)?;
        let log_rho = rho.ln();
        let log_1m = (-rho).ln_1p();
        let mut acc = LogSum::new();
        acc.add(heavy_sum(self.qm, rho, x, k, HeavySumMode::Exact)?);
        let mut n = k + 1;
        loop {
            let nf = n as f64;
            let y = self.y(x, n);
            let (pi_on, j_on) = self.gates(y, n)?;
            let weight = log_1m + nf * log_rho;
            if pi_on {
                acc.add(weight + self.hat_pi(x, n)?);
            }
            if j_on {
                acc.add(weight + self.j_integral(y, n)?);
            }
            // remaining terms: each component is at most about 1 once y ≤ 0
            if y <= 0.0 {
                let rest = (nf + 1.0) * log_rho + 2f64.ln();
                if rest < acc.ln() + SUM_REL_CUTOFF.ln() {
                    break;
                }
            }
            n += 1;
        }
        Ok(acc.ln())
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::Domain {
            name: "n",
            value: 0.0,
            domain: "n >= 1",
        })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::IntegratedTailModel;

    fn pareto() -> QueueModel {
        QueueModel::new(IntegratedTailModel::pareto(3.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn hat_pi_at_the_mean_is_half() {
        let qm = pareto();
        let rw = RwApprox::new(&qm);
        let v = rw.hat_pi(50.0, 100).unwrap();
        assert!((v - 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn c_n_in_clamped_region() {
        // Q̃ ≤ 1 on the relevant range: h(t) = t/2 + n/t, minimum √(2n)
        let mut qm = pareto();
        qm.dist = IntegratedTailModel::pareto(2.5, 1e6).unwrap();
        let rw = RwApprox::new(&qm);
        let ts = ThresholdSet::new(&qm);
        let n = 8;
        let t0 = (2.0 * n as f64).sqrt();
        assert!(ts.q_tilde(t0) <= 1.0);
        let c = rw.c_n(n).unwrap();
        assert!((c - t0).abs() < 1e-7 * t0, "{c} vs {t0}");
    }

    #[test]
    fn c_n_is_within_bracket_and_monotone() {
        let qm = pareto();
        let rw = RwApprox::new(&qm);
        let mut prev = 0.0;
        for n in [1u64, 10, 100, 1000] {
            let c = rw.c_n(n).unwrap();
            let (lo, hi) = rw.c_n_bracket(n).unwrap();
            assert!(c >= lo && c <= hi * (1.0 + 1e-9), "n={n} {lo} {c} {hi}");
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn big_jump_branch() {
        let qm = pareto();
        let rw = RwApprox::new(&qm);
        let x = 1000.0;
        let out = rw.rw_tail(x, 1).unwrap();
        assert_eq!(out.branch, Branch::BigJump);
        assert!((out.log_value - qm.dist.log_tail(x - qm.mu)).abs() < 1e-14);
        let far = rw.rw_tail(x, 10_000).unwrap();
        assert_eq!(far.branch, Branch::Bkappa);
    }

    #[test]
    fn j_for_large_y_behaves_like_single_jump() {
        let qm = pareto();
        let rw = RwApprox::new(&qm);
        let (y, n) = (1e3, 4u64);
        let j = rw.j_integral(y, n).unwrap();
        let single = (n as f64).ln() + qm.dist.log_tail(qm.sigma() * y + qm.mu);
        assert!(((j - single).exp() - 1.0).abs() < 0.2);
    }

    #[test]
    fn gates_follow_indicators() {
        let qm = pareto();
        let rw = RwApprox::new(&qm);
        let n = 50;
        let c = rw.c_n(n).unwrap();
        assert_eq!(rw.gates(0.5 * c, n).unwrap(), (true, false));
        assert_eq!(rw.gates(2.0 * c, n).unwrap(), (false, true));
        assert_eq!(rw.gates(c, n).unwrap(), (true, true));
    }

    #[test]
    fn weibull_hat_pi_decreases_in_y() {
        let qm = QueueModel::new(IntegratedTailModel::weibull(0.5, 1.0).unwrap()).unwrap();
        let rw = RwApprox::new(&qm);
        let x = 2000.0;
        let ts = ThresholdSet::new(&qm);
        let (m, n_max) = (ts.m(x).unwrap(), ts.n(x));
        assert!(m < n_max);
        let mut prev = f64::NEG_INFINITY;
        // y grows as n falls
        for n in (m + 1..=n_max).rev() {
            let v = rw.hat_pi(x, n).unwrap();
            assert!(v.is_finite() && v < 0.0);
            if prev.is_finite() {
                assert!(v <= prev);
            }
            prev = v;
        }
    }

    #[test]
    fn s_kappa_small_rho_matches_first_term() {
        let qm = pareto();
        let rw = RwApprox::new(&qm);
        let (rho, x) = (1e-4, 500.0);
        let s = rw.s_kappa(rho, x).unwrap();
        let first = rho.ln() + qm.dist.log_tail(x - qm.mu);
        assert!((s - first).abs() < 0.01, "{s} {first}");
    }
}
