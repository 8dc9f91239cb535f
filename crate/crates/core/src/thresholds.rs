//! Region machinery: ω₁, ω₂, b and their right inverses, the thresholds
//! K_r(x) ≤ M(x) ≤ N(x), and the heavy-tail / heavy-traffic classifier.
//!
//! All functions of Q here use the model's threshold cumulative hazard
//! (the quadratic surrogate for the lognormal family).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::QueueModel;
use crate::quad::golden_min;

const SCAN_START: f64 = 1e-12;
const SCAN_RATIO: f64 = 1.05;
const SCAN_LIMIT: f64 = 1e300;
const PEAK_TOL: f64 = 1e-12;
const MAX_EXACT_INDEX: f64 = 9_007_199_254_740_992.0;

/// Generalized right inverse f⁻¹(t) = inf{u ≥ 0 : t ≤ f(u)} of a continuous
/// nonnegative function with f(u) → ∞.
///
/// f is sampled on a geometric scan. Every sampled local maximum is refined
/// by golden section, so a bump that reaches `t` between two scan points is
/// still found; this matters when `t` is itself a value of the running
/// maximum sup_{s≤u} f(s). The first crossing is then bisected to machine
/// precision.
pub fn right_inverse<F: Fn(f64) -> f64>(f: F, t: f64) -> Result<f64> {
    let f0 = f(0.0);
    if t <= f0 {
        return Ok(0.0);
    }
    // (u, f(u)) at the two previous scan points
    let mut prev2 = (0.0, f0);
    let mut prev = (0.0, f0);
    let mut hi = SCAN_START;
    let (lo, hi) = loop {
        let v = f(hi);
        if v >= t {
            break (prev.0, hi);
        }
        if prev.1 > prev2.1 && prev.1 >= v {
            let (peak, top) = golden_min(|s| -f(s), prev2.0, hi, 4.0 * f64::EPSILON);
            if -top >= t {
                if f(prev2.0) >= t {
                    return Ok(prev2.0);
                }
                break (prev2.0, peak);
            }
            // a peak that falls short only by the search resolution
            if -top >= t * (1.0 - PEAK_TOL) {
                return Ok(peak);
            }
        }
        prev2 = prev;
        prev = (hi, v);
        hi *= SCAN_RATIO;
        if hi > SCAN_LIMIT {
            return Err(Error::Bracketing { level: t });
        }
    };
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= t {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Running-maximum envelope sup_{s ≤ u} f(s) evaluated on a dense grid.
/// Intended for diagnostics and tests; production code never tabulates it.
pub fn envelope<F: Fn(f64) -> f64>(f: F, u: f64, points: usize) -> f64 {
    (0..=points)
        .map(|i| f(u * i as f64 / points as f64))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    HeavyTailRegion,
    HeavyTrafficSideRegion,
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Region::HeavyTailRegion => "heavy_tail",
            Region::HeavyTrafficSideRegion => "heavy_traffic_side",
        })
    }
}

/// Threshold functions of one queue model.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdSet<'a> {
    pub qm: &'a QueueModel,
}

impl<'a> ThresholdSet<'a> {
    pub fn new(qm: &'a QueueModel) -> Self {
        Self { qm }
    }

    fn q(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            self.qm.dist.threshold_q(t)
        }
    }

    pub fn omega1(&self, t: f64) -> f64 {
        t * t / self.q(t).max(1.0)
    }

    pub fn omega2(&self, t: f64) -> f64 {
        let d = self.q(t).max(1.0);
        t * t / (d * d)
    }

    pub fn omega1_inv(&self, x: f64) -> Result<f64> {
        right_inverse(|t| self.omega1(t), x)
    }

    pub fn omega2_inv(&self, x: f64) -> Result<f64> {
        right_inverse(|t| self.omega2(t), x)
    }

    /// Q̃(t) = Q(σt + μ) - 2 log t.
    pub fn q_tilde(&self, t: f64) -> f64 {
        self.q(self.qm.sigma() * t + self.qm.mu) - 2.0 * t.ln()
    }

    /// Derivative of Q̃: σ q(σt + μ) - 2/t.
    pub fn q_tilde_rate(&self, t: f64) -> f64 {
        let s = self.qm.sigma();
        s * self.qm.dist.threshold_hazard(s * t + self.qm.mu) - 2.0 / t
    }

    /// b(t) = t²/(Q̃(t) ∨ 1), with b(0) = 0.
    pub fn b(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        t * t / self.q_tilde(t).max(1.0)
    }

    pub fn b_inv(&self, t: f64) -> Result<f64> {
        right_inverse(|u| self.b(u), t)
    }

    /// Sum indices are carried as f64, so x/μ must stay below 2^53.
    fn check_index_range(&self, x: f64) -> Result<()> {
        if x / self.qm.mu < MAX_EXACT_INDEX {
            Ok(())
        } else {
            Err(Error::Domain {
                name: "x",
                value: x,
                domain: "x / mu < 2^53",
            })
        }
    }

    pub fn k_r(&self, x: f64) -> Result<u64> {
        self.check_index_range(x)?;
        let mu = self.qm.mu;
        let v = if self.qm.r < 0.5 {
            (x - self.omega2_inv(x)?) / mu
        } else {
            self.omega2(x).min(x / (2.0 * mu))
        };
        Ok(floor_nonneg(v))
    }

    pub fn m(&self, x: f64) -> Result<u64> {
        self.check_index_range(x)?;
        Ok(floor_nonneg((x - self.omega1_inv(x)?) / self.qm.mu))
    }

    pub fn n(&self, x: f64) -> u64 {
        let xlx = (x * x.ln()).max(0.0);
        floor_nonneg((x - xlx.sqrt()) / self.qm.mu)
    }

    /// ρ*(x) = exp(-μ Q(x)/x): the approximate heavy-tail boundary.
    pub fn rho_star(&self, x: f64) -> f64 {
        (-self.qm.mu * self.q(x) / x).exp()
    }

    /// Heavy-tail region iff ρ < ρ*(x); ties go to the traffic side.
    pub fn region(&self, rho: f64, x: f64) -> Result<Region> {
        crate::error::check_rho(rho)?;
        crate::error::check_positive("x", x)?;
        Ok(if rho < self.rho_star(x) {
            Region::HeavyTailRegion
        } else {
            Region::HeavyTrafficSideRegion
        })
    }

    /// Smallest point x₀ of an ascending grid such that K_r ≤ M ≤ N holds at
    /// x₀ and every later grid point. `None` if it fails at the last point.
    pub fn ordering_onset(&self, grid: &[f64]) -> Result<Option<f64>> {
        let mut onset = None;
        for &x in grid.iter().rev() {
            let (k, m, n) = (self.k_r(x)?, self.m(x)?, self.n(x));
            if k <= m && m <= n {
                onset = Some(x);
            } else {
                break;
            }
        }
        Ok(onset)
    }

    pub fn row(&self, x: f64) -> Result<ThresholdRow> {
        Ok(ThresholdRow {
            x,
            k_r: self.k_r(x)?,
            m: self.m(x)?,
            n: self.n(x),
            omega1_inv: self.omega1_inv(x)?,
            omega2_inv: self.omega2_inv(x)?,
            b_inv: self.b_inv(x)?,
            rho_star: self.rho_star(x),
        })
    }
}

/// One line of the `thresholds` table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub x: f64,
    pub k_r: u64,
    pub m: u64,
    pub n: u64,
    pub omega1_inv: f64,
    pub omega2_inv: f64,
    pub b_inv: f64,
    pub rho_star: f64,
}

fn floor_nonneg(v: f64) -> u64 {
    if v.is_nan() || v <= 0.0 {
        0
    } else {
        v.floor() as u64
    }
}
