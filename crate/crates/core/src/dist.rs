//! Subexponential integrated-tail distributions.
//!
//! Every queue-level quantity is driven by the integrated tail F of the
//! service time. The models here expose F̄, the cumulative hazard
//! Q = -log F̄, the hazard rate q = Q', raw moments, and the analytic hazard
//! index (r, κ) of each family.
//!
//! The Weibull family is parameterized as F̄(x) = exp(-β x^α) with β a rate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ln_gamma, ln_norm_pdf, ln_norm_sf};

/// Anything with a tail function that can be inverted. Implemented by
/// [`IntegratedTailModel`]; the Monte Carlo oracles are generic over it.
pub trait TailLaw {
    /// log F̄(t); equals 0 for t ≤ 0.
    fn log_tail(&self, t: f64) -> f64;

    /// F̄⁻¹(p) for p ∈ (0, 1).
    fn inverse_tail(&self, p: f64) -> f64;

    fn tail(&self, t: f64) -> f64 {
        self.log_tail(t).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Pareto,
    Weibull,
    Lognormal,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Pareto => "pareto",
            Family::Weibull => "weibull",
            Family::Lognormal => "lognormal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegratedTailModel {
    /// F̄(x) = (1 + x/scale)^(-shape), shape > 2.
    Pareto { shape: f64, scale: f64 },
    /// F̄(x) = exp(-rate · x^shape), shape ∈ (0, 1).
    Weibull { shape: f64, rate: f64 },
    /// Upper tail of exp(N(location, scale²)).
    Lognormal { location: f64, scale: f64 },
}

/// Analytic hazard index of a model: r = limsup t q(t)/Q(t) and the Cramér
/// truncation order κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HazardIndex {
    pub r: f64,
    pub kappa: usize,
}

/// Finite-grid diagnostic for the hazard assumption. Not a proof.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticReport {
    /// a(r): 2 for r = 0, 4/(1-r) otherwise.
    pub a_r: f64,
    /// min of t q(t) over the upper half of the grid.
    pub min_tq: f64,
    /// min of Q(t)/log t over the upper half of the grid (points with t > 1).
    pub min_q_over_log: f64,
    pub hazard_ok: bool,
    pub log_bound_ok: bool,
}

impl DiagnosticReport {
    pub fn passed(&self) -> bool {
        self.hazard_ok && self.log_bound_ok
    }
}

/// a(r) from the hazard assumption.
pub fn hazard_threshold(r: f64) -> f64 {
    if r == 0.0 {
        2.0
    } else {
        4.0 / (1.0 - r)
    }
}

impl IntegratedTailModel {
    pub fn pareto(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 2.0 && shape.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: shape,
                reason: "pareto shape must exceed 2",
            });
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "scale",
                value: scale,
                reason: "pareto scale must be positive",
            });
        }
        Ok(Self::Pareto { shape, scale })
    }

    pub fn weibull(shape: f64, rate: f64) -> Result<Self> {
        if !(shape > 0.0 && shape < 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: shape,
                reason: "weibull shape must lie in (0, 1)",
            });
        }
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: rate,
                reason: "weibull rate must be positive",
            });
        }
        Ok(Self::Weibull { shape, rate })
    }

    pub fn lognormal(location: f64, scale: f64) -> Result<Self> {
        if !location.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: location,
                reason: "lognormal location must be finite",
            });
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: scale,
                reason: "lognormal scale must be positive",
            });
        }
        Ok(Self::Lognormal { location, scale })
    }

    pub fn family(&self) -> Family {
        match self {
            Self::Pareto { .. } => Family::Pareto,
            Self::Weibull { .. } => Family::Weibull,
            Self::Lognormal { .. } => Family::Lognormal,
        }
    }

    /// F̄(t); 1 for t ≤ 0.
    pub fn tail(&self, t: f64) -> f64 {
        self.log_tail(t).exp()
    }

    /// log F̄(t) computed without leaving the log domain.
    pub fn log_tail(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            Self::Pareto { shape, scale } => -shape * (t / scale).ln_1p(),
            Self::Weibull { shape, rate } => -rate * t.powf(shape),
            Self::Lognormal { location, scale } => ln_norm_sf((t.ln() - location) / scale),
        }
    }

    /// Q(t) = -log F̄(t).
    pub fn cumulative_hazard(&self, t: f64) -> Result<f64> {
        positive_arg(t)?;
        Ok(-self.log_tail(t))
    }

    /// q(t) = Q'(t).
    pub fn hazard_rate(&self, t: f64) -> Result<f64> {
        positive_arg(t)?;
        Ok(self.hazard_unchecked(t))
    }

    pub(crate) fn hazard_unchecked(&self, t: f64) -> f64 {
        match *self {
            Self::Pareto { shape, scale } => shape / (scale + t),
            Self::Weibull { shape, rate } => shape * rate * t.powf(shape - 1.0),
            Self::Lognormal { location, scale } => {
                let z = (t.ln() - location) / scale;
                (ln_norm_pdf(z) - ln_norm_sf(z)).exp() / (scale * t)
            }
        }
    }

    /// Cumulative hazard used by the threshold machinery. For the lognormal
    /// family this is the quadratic surrogate ((log t - α)⁺)²/(2β²); the
    /// other families return the exact Q.
    pub fn cumulative_hazard_approx(&self, t: f64) -> Result<f64> {
        positive_arg(t)?;
        Ok(self.threshold_q(t))
    }

    pub(crate) fn threshold_q(&self, t: f64) -> f64 {
        match *self {
            Self::Lognormal { location, scale } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let d = (t.ln() - location).max(0.0);
                d * d / (2.0 * scale * scale)
            }
            _ => -self.log_tail(t),
        }
    }

    /// Derivative of [`Self::threshold_q`].
    pub(crate) fn threshold_hazard(&self, t: f64) -> f64 {
        match *self {
            Self::Lognormal { location, scale } => {
                let d = (t.ln() - location).max(0.0);
                d / (scale * scale * t)
            }
            _ => self.hazard_unchecked(t),
        }
    }

    /// Exact k-th raw moment of X ~ F.
    pub fn raw_moment(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Ok(1.0);
        }
        let kf = k as f64;
        match *self {
            Self::Pareto { shape, scale } => {
                if kf >= shape {
                    return Err(Error::UnsupportedMoment { order: k });
                }
                // b^k Γ(k+1) Γ(α-k) / Γ(α)
                Ok((kf * scale.ln() + ln_gamma(kf + 1.0) + ln_gamma(shape - kf)
                    - ln_gamma(shape))
                .exp())
            }
            Self::Weibull { shape, rate } => {
                let p = kf / shape;
                Ok((ln_gamma(1.0 + p) - p * rate.ln()).exp())
            }
            Self::Lognormal { location, scale } => {
                Ok((kf * location + 0.5 * kf * kf * scale * scale).exp())
            }
        }
    }

    /// Analytic (r, κ) per family.
    pub fn hazard_index(&self) -> HazardIndex {
        match *self {
            Self::Pareto { .. } | Self::Lognormal { .. } => HazardIndex { r: 0.0, kappa: 2 },
            Self::Weibull { shape, .. } => {
                // κ = max{l : l/(l+1) ≤ α} + 2
                let mut l = 0usize;
                while ((l + 1) as f64) / ((l + 2) as f64) <= shape + 1e-12 {
                    l += 1;
                }
                HazardIndex {
                    r: shape,
                    kappa: l + 2,
                }
            }
        }
    }

    /// Checks liminf t q(t) > a(r) and Q(t) ≥ β log t with β > a(r) on the
    /// upper half of an ascending grid.
    pub fn check_assumption(&self, t_grid: &[f64]) -> Result<DiagnosticReport> {
        if t_grid.is_empty() {
            return Err(Error::Config("check_assumption needs a nonempty grid".into()));
        }
        let a_r = hazard_threshold(self.hazard_index().r);
        let upper = &t_grid[t_grid.len() / 2..];
        let mut min_tq = f64::INFINITY;
        let mut min_ratio = f64::INFINITY;
        for &t in upper {
            positive_arg(t)?;
            min_tq = min_tq.min(t * self.hazard_unchecked(t));
            if t > 1.0 {
                min_ratio = min_ratio.min(-self.log_tail(t) / t.ln());
            }
        }
        Ok(DiagnosticReport {
            a_r,
            min_tq,
            min_q_over_log: min_ratio,
            hazard_ok: min_tq > a_r,
            log_bound_ok: min_ratio > a_r,
        })
    }

    /// Inverse-CDF sample: F̄⁻¹(1 - u).
    pub fn sample_x(&self, u: f64) -> f64 {
        self.inverse_tail(1.0 - u)
    }
}

impl TailLaw for IntegratedTailModel {
    fn log_tail(&self, t: f64) -> f64 {
        IntegratedTailModel::log_tail(self, t)
    }

    fn inverse_tail(&self, p: f64) -> f64 {
        let lp = p.ln();
        match *self {
            Self::Pareto { shape, scale } => scale * (-lp / shape).exp_m1(),
            Self::Weibull { shape, rate } => (-lp / rate).powf(1.0 / shape),
            Self::Lognormal { location, scale } => {
                (location + scale * inverse_log_sf(lp)).exp()
            }
        }
    }
}

/// Solves log(1 - Φ(z)) = target by Newton steps safeguarded with bisection.
fn inverse_log_sf(target: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    let mut z = 0.0;
    for _ in 0..200 {
        let g = ln_norm_sf(z) - target;
        if g.abs() <= 1e-15 * target.abs().max(1e-300) {
            break;
        }
        // ln_norm_sf is decreasing
        if g > 0.0 {
            lo = z;
        } else {
            hi = z;
        }
        let slope = -(ln_norm_pdf(z) - ln_norm_sf(z)).exp();
        let mut next = z - g / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - z).abs() <= 1e-14 * (1.0 + z.abs()) {
            z = next;
            break;
        }
        z = next;
    }
    z
}

fn positive_arg(t: f64) -> Result<()> {
    if t > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "t",
            value: t,
            domain: "(0, inf)",
        })
    }
}
