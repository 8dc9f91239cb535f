#![allow(dead_code)]

use mg1tail_core::sim::{open_uniform, replicate};
use mg1tail_core::{IntegratedTailModel, QueueModel, TailLaw};

/// Exponential law with the given mean. Not subexponential; used only
/// because P(W > x) = ρ e^{-(1-ρ)x/m} is known exactly.
#[derive(Debug, Clone, Copy)]
pub struct Exponential {
    pub mean: f64,
}

impl TailLaw for Exponential {
    fn log_tail(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            -t / self.mean
        }
    }

    fn inverse_tail(&self, p: f64) -> f64 {
        -self.mean * p.ln()
    }
}

pub fn exact_exponential_wait(rho: f64, x: f64, mean: f64) -> f64 {
    rho * (-(1.0 - rho) * x / mean).exp()
}

pub fn pareto() -> IntegratedTailModel {
    IntegratedTailModel::pareto(3.0, 1.0).unwrap()
}

pub fn lognormal() -> IntegratedTailModel {
    IntegratedTailModel::lognormal(0.0, 1.0).unwrap()
}

pub fn weibull() -> IntegratedTailModel {
    IntegratedTailModel::weibull(0.5, 1.0).unwrap()
}

pub fn standard_models() -> Vec<QueueModel> {
    [pareto(), lognormal(), weibull()]
        .into_iter()
        .map(|d| QueueModel::new(d).unwrap())
        .collect()
}

/// P(S_k > x) for k = 1..=n_max on a lattice of step h, with every summand
/// rounded down (`up = false`) or up (`up = true`) to the lattice. Rounding
/// down gives a lower bound on the true tail and rounding up an upper bound.
/// Tails are propagated directly, T_k(m) = P(X' > m) + Σ_{j≤m} p_j T_{k-1}(m-j),
/// so no cancellation occurs even for tiny probabilities.
pub fn lattice_tails<D: TailLaw>(dist: &D, n_max: usize, x: f64, h: f64, up: bool) -> Vec<f64> {
    let m_max = (x / h).floor() as usize;
    // p[j] = P(X' = j)
    let p: Vec<f64> = (0..=m_max)
        .map(|j| {
            let (a, b) = if up {
                if j == 0 {
                    return 0.0;
                }
                ((j - 1) as f64 * h, j as f64 * h)
            } else {
                (j as f64 * h, (j + 1) as f64 * h)
            };
            mass(dist, a, b)
        })
        .collect();
    // tail1[m] = P(X' > m)
    let tail1: Vec<f64> = (0..=m_max)
        .map(|m| {
            let edge = if up { m as f64 * h } else { (m + 1) as f64 * h };
            dist.tail(edge)
        })
        .collect();
    let mut t = tail1.clone();
    let mut out = vec![t[m_max]];
    for _ in 2..=n_max {
        let mut next = vec![0.0; m_max + 1];
        for m in 0..=m_max {
            let mut acc = tail1[m];
            for j in 0..=m {
                acc += p[j] * t[m - j];
            }
            next[m] = acc;
        }
        t = next;
        out.push(t[m_max]);
    }
    out
}

/// F̄(a) - F̄(b) without cancellation when both are tiny.
fn mass<D: TailLaw>(dist: &D, a: f64, b: f64) -> f64 {
    let la = dist.log_tail(a);
    let lb = dist.log_tail(b);
    la.exp() * -(lb - la).exp_m1()
}

/// Lattice oracle for P(S_k > x), k = 1..=n_max: midpoint of the lower and
/// upper lattice bounds, with h halved until every entry moves by < 1%.
pub fn convolution_oracle<D: TailLaw>(dist: &D, n_max: usize, x: f64, h0: f64) -> Vec<f64> {
    let eval = |h: f64| {
        let lo = lattice_tails(dist, n_max, x, h, false);
        let hi = lattice_tails(dist, n_max, x, h, true);
        lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect::<Vec<_>>()
    };
    let mut h = h0;
    let mut prev = eval(h);
    for _ in 0..6 {
        h /= 2.0;
        let cur = eval(h);
        let stable = prev
            .iter()
            .zip(&cur)
            .all(|(a, b)| ((a - b) / b).abs() < 0.01);
        prev = cur;
        if stable {
            return prev;
        }
    }
    panic!("convolution oracle did not stabilize at x = {x}");
}

/// Crude Monte Carlo for P(W > x): indicator of a geometric sum exceeding x.
pub fn crude_pk_mc<D: TailLaw + Sync>(dist: &D, rho: f64, x: f64, reps: u64, seed: u64) -> (f64, f64) {
    let lr = rho.ln();
    let w = replicate(reps, seed, |rng| {
        let n = mg1tail_core::sim::geometric(lr, open_uniform(rng));
        let mut s = 0.0;
        for _ in 0..n {
            s += dist.inverse_tail(open_uniform(rng));
            if s > x {
                return 1.0;
            }
        }
        0.0
    });
    (w.mean, (w.variance() / reps as f64).sqrt())
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
