//! Queue-level parameters derived from an integrated-tail model.

use crate::dist::IntegratedTailModel;
use crate::error::Result;
use crate::special::{binomial, factorial};

/// μ, σ², standardized cumulants and Cramér coefficients of X ~ F.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueModel {
    pub dist: IntegratedTailModel,
    pub mu: f64,
    pub sigma2: f64,
    /// γ₁..γ_κ of Y = (X - μ)/σ; `gamma[0]` is γ₁.
    pub gamma: Vec<f64>,
    /// λ₂..λ_κ; `lambda[0]` is λ₂ = -1.
    pub lambda: Vec<f64>,
    pub r: f64,
    pub kappa: usize,
}

impl QueueModel {
    pub fn new(dist: IntegratedTailModel) -> Result<Self> {
        build_queue_model(dist)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    /// λ_j for 2 ≤ j ≤ κ.
    pub fn lambda_j(&self, j: usize) -> f64 {
        self.lambda[j - 2]
    }
}

pub fn build_queue_model(dist: IntegratedTailModel) -> Result<QueueModel> {
    let idx = dist.hazard_index();
    let kappa = idx.kappa;
    let raw = (1..=kappa)
        .map(|k| dist.raw_moment(k))
        .collect::<Result<Vec<_>>>()?;
    let mu = raw[0];
    let sigma2 = raw[1] - mu * mu;
    let sigma = sigma2.sqrt();

    // moments of Y about zero from central moments of X
    let mut std_moments = Vec::with_capacity(kappa);
    for k in 1..=kappa {
        let mut central = 0.0;
        for i in 0..=k {
            let m_i = if i == 0 { 1.0 } else { raw[i - 1] };
            central += binomial(k, i) * m_i * (-mu).powi((k - i) as i32);
        }
        std_moments.push(central / sigma.powi(k as i32));
    }
    let gamma = moments_to_cumulants(&std_moments);
    let mut lambda = vec![-1.0];
    if kappa >= 3 {
        lambda.extend(cramer_coefficients(&gamma[2..]));
    }
    Ok(QueueModel {
        dist,
        mu,
        sigma2,
        gamma,
        lambda,
        r: idx.r,
        kappa,
    })
}

/// Raw moments m₁..m_k to cumulants via
/// γ_n = m_n - Σ_{j<n} C(n-1, j-1) γ_j m_{n-j}.
pub fn moments_to_cumulants(m: &[f64]) -> Vec<f64> {
    let mut gamma: Vec<f64> = Vec::with_capacity(m.len());
    for n in 1..=m.len() {
        let mut g = m[n - 1];
        for j in 1..n {
            g -= binomial(n - 1, j - 1) * gamma[j - 1] * m[n - j - 1];
        }
        gamma.push(g);
    }
    gamma
}

/// All multiplicity vectors (n₁..n_k) with Σ i·n_i = k. For k = 0 the only
/// element is the empty vector.
pub fn partitions(k: usize) -> Vec<Vec<usize>> {
    fn rec(part: usize, remaining: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if part == 0 {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for mult in 0..=remaining / part {
            cur[part - 1] = mult;
            rec(part - 1, remaining - mult * part, cur, out);
        }
        cur[part - 1] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; k];
    rec(k, k, &mut cur, &mut out);
    out
}

/// Cramér-series coefficients λ₃..λ_k from the cumulants γ₃..γ_k of a
/// zero-mean, unit-variance variable (`gamma[0]` is γ₃):
///
/// λ_j = Σ_{A_{j-2}} (j + s - 2)! (-1)^{s+1} Π_m (γ_{m+2}/(m+1)!)^{n_m} / n_m!
///
/// where s = n₁ + … + n_{j-2}.
pub fn cramer_coefficients(gamma: &[f64]) -> Vec<f64> {
    let k = gamma.len() + 2;
    (3..=k)
        .map(|j| {
            partitions(j - 2)
                .iter()
                .map(|mult| {
                    let s: usize = mult.iter().sum();
                    let sign = if (s + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
                    let prod: f64 = mult
                        .iter()
                        .enumerate()
                        .map(|(i, &n_m)| {
                            let m = i + 1;
                            (gamma[m - 1] / factorial(m + 1)).powi(n_m as i32) / factorial(n_m)
                        })
                        .product();
                    factorial(j + s - 2) * sign * prod
                })
                .sum()
        })
        .collect()
}
