//! The exponent polynomial Λ_ρ and its interior maximizer u(ρ).
//!
//! Λ_ρ(t) = (1 - t) log ρ + Σ_{i=2}^{κ} c_i t^i with
//! c_i = Σ_{j=2}^{i} λ_j μ^j / (j! σ^j) · C(i-2, i-j), the Taylor
//! coefficients of (1 - t) Q_κ(μt / (σ(1 - t))). The coefficients do not
//! depend on ρ, which only enters through the linear term.

use nalgebra::DMatrix;

use crate::error::{check_rho, Error, Result};
use crate::model::{partitions, QueueModel};
use crate::special::{binomial, factorial};

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaPoly {
    pub kappa: usize,
    pub mu: f64,
    pub sigma2: f64,
    /// λ₂..λ_κ.
    pub lambda: Vec<f64>,
    /// c₂..c_κ; `coeff[0]` is c₂.
    pub coeff: Vec<f64>,
    /// a₀..a_{κ-2} with P_κ(t) = Λ'_ρ(t) + log ρ = t Σ a_j t^j.
    pub a: Vec<f64>,
}

impl LambdaPoly {
    pub fn new(qm: &QueueModel) -> Self {
        let kappa = qm.kappa;
        let ratio = qm.mu / qm.sigma();
        let coeff: Vec<f64> = (2..=kappa)
            .map(|i| {
                (2..=i)
                    .map(|j| {
                        qm.lambda_j(j) * ratio.powi(j as i32) / factorial(j)
                            * binomial(i - 2, i - j)
                    })
                    .sum()
            })
            .collect();
        let a = coeff
            .iter()
            .enumerate()
            .map(|(k, c)| (k + 2) as f64 * c)
            .collect();
        Self {
            kappa,
            mu: qm.mu,
            sigma2: qm.sigma2,
            lambda: qm.lambda.clone(),
            coeff,
            a,
        }
    }

    /// c_i for 2 ≤ i ≤ κ.
    pub fn c(&self, i: usize) -> f64 {
        self.coeff[i - 2]
    }

    /// Q_κ(t) = Σ_{j=2}^{κ} λ_j t^j / j!.
    pub fn q_kappa(&self, t: f64) -> f64 {
        q_kappa(&self.lambda, t)
    }

    /// Σ c_i t^i, the ρ-free part of Λ_ρ.
    fn poly(&self, t: f64) -> f64 {
        self.coeff.iter().rev().fold(0.0, |acc, c| acc * t + c) * t * t
    }

    pub fn lambda_rho(&self, rho: f64, t: f64) -> Result<f64> {
        check_rho(rho)?;
        Ok(self.lambda_log(rho.ln(), t))
    }

    pub(crate) fn lambda_log(&self, log_rho: f64, t: f64) -> f64 {
        (1.0 - t) * log_rho + self.poly(t)
    }

    /// Λ'_ρ(t) given log ρ.
    pub fn derivative(&self, log_rho: f64, t: f64) -> f64 {
        -log_rho + self.p_kappa(t)
    }

    /// P_κ(t) = t Σ a_j t^j.
    pub fn p_kappa(&self, t: f64) -> f64 {
        self.a.iter().rev().fold(0.0, |acc, a| acc * t + a) * t
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        self.coeff
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let i = (k + 2) as i32;
                (i * (i - 1)) as f64 * c * t.powi(i - 2)
            })
            .sum()
    }

    /// Smallest positive root of Λ'_ρ.
    pub fn u_star(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        self.u_star_log(rho.ln())
    }

    pub(crate) fn u_star_log(&self, log_rho: f64) -> Result<f64> {
        if self.kappa == 2 {
            return Ok(-self.sigma2 / (self.mu * self.mu) * log_rho);
        }
        // Λ'(t) = -log ρ + Σ_{i=2}^{κ} i c_i t^{i-1}, ascending coefficients
        let mut p = vec![-log_rho];
        p.extend(self.a.iter().copied());
        while p.len() > 1 && p[p.len() - 1] == 0.0 {
            p.pop();
        }
        let no_root = Error::NoPositiveRoot { log_rho };
        let mut candidates: Vec<f64> = polynomial_roots(&p)
            .into_iter()
            .filter(|&(re, im)| re > 0.0 && im.abs() <= 1e-6 * (1.0 + re.abs()))
            .map(|(re, _)| re)
            .collect();
        candidates.sort_by(f64::total_cmp);
        for guess in candidates {
            let u = self.newton_refine(log_rho, guess);
            let resid = self.derivative(log_rho, u).abs();
            if u > 0.0 && resid <= 1e-10 * (1.0 + log_rho.abs()) {
                if self.second_derivative(u) >= 0.0 {
                    return Err(no_root);
                }
                return Ok(u);
            }
        }
        Err(no_root)
    }

    fn newton_refine(&self, log_rho: f64, mut u: f64) -> f64 {
        for _ in 0..50 {
            let g = self.derivative(log_rho, u);
            let h = self.second_derivative(u);
            if h == 0.0 {
                break;
            }
            let step = g / h;
            u -= step;
            if step.abs() <= 1e-16 * u.abs() {
                break;
            }
        }
        u
    }

    /// Λ_ρ(u(ρ)).
    pub fn lambda_at_u(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        let log_rho = rho.ln();
        let u = self.u_star_log(log_rho)?;
        Ok(self.lambda_log(log_rho, u))
    }

    /// Lagrange-inversion coefficients b₁..b_{n_max} with
    /// u(ρ) = Σ b_n (log ρ)^n / n!.
    pub fn u_series_coeffs(&self, n_max: usize) -> Vec<f64> {
        let a0 = self.a[0];
        let a_j = |j: usize| if j < self.a.len() { self.a[j] } else { 0.0 };
        (1..=n_max)
            .map(|n| {
                partitions(n - 1)
                    .iter()
                    .map(|mult| {
                        let s: usize = mult.iter().sum();
                        let sign = if s.is_multiple_of(2) { 1.0 } else { -1.0 };
                        let prod: f64 = mult
                            .iter()
                            .enumerate()
                            .map(|(i, &m)| a_j(i + 1).powi(m as i32) / factorial(m))
                            .product();
                        factorial(n + s - 1) * sign * a0.powi(-((n + s) as i32)) * prod
                    })
                    .sum()
            })
            .collect()
    }
}

pub fn q_kappa(lambda: &[f64], t: f64) -> f64 {
    lambda
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let j = k + 2;
            l * t.powi(j as i32) / factorial(j)
        })
        .sum()
}

/// Complex roots (re, im) of Σ p_k t^k via eigenvalues of the companion
/// matrix.
pub fn polynomial_roots(p: &[f64]) -> Vec<(f64, f64)> {
    let deg = p.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = p[deg];
    let mut comp = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -p[i] / lead;
    }
    comp.complex_eigenvalues()
        .iter()
        .map(|z| (z.re, z.im))
        .collect()
}
