//! Monte Carlo oracles for P(W > x) and P(S_n > x).
//!
//! Replication i draws from a ChaCha8 stream keyed by (seed, i), and the
//! replications are reduced in fixed-size chunks merged in index order, so
//! the result does not depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dist::TailLaw;
use crate::error::{check_rho, Error, Result};

const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub reps: u64,
    pub seed: u64,
}

/// Streaming mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Welford {
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        let d = v - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (v - self.mean);
    }

    /// Pairwise combination of two partial summaries.
    pub fn merge(&mut self, o: &Welford) {
        if o.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *o;
            return;
        }
        let n = (self.count + o.count) as f64;
        let d = o.mean - self.mean;
        self.mean += d * o.count as f64 / n;
        self.m2 += o.m2 + d * d * self.count as f64 * o.count as f64 / n;
        self.count += o.count;
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }
}

/// Uniform on the open interval (0, 1).
pub fn open_uniform<R: Rng>(rng: &mut R) -> f64 {
    ((rng.random::<u64>() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Runs `reps` replications of `one` and returns the merged summary. Each
/// replication receives its own generator positioned at stream `i`.
pub fn replicate<F>(reps: u64, seed: u64, one: F) -> Welford
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let base = ChaCha8Rng::seed_from_u64(seed);
    let chunks = reps.div_ceil(CHUNK);
    let parts: Vec<Welford> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut w = Welford::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(reps) {
                let mut rng = base.clone();
                rng.set_stream(i);
                w.push(one(&mut rng));
            }
            w
        })
        .collect();
    parts.iter().fold(Welford::default(), |mut acc, w| {
        acc.merge(w);
        acc
    })
}

fn finish(w: Welford, reps: u64, seed: u64) -> SimulationEstimate {
    SimulationEstimate {
        estimate: w.mean,
        std_error: (w.variance() / reps as f64).sqrt(),
        reps,
        seed,
    }
}

/// Geometric N with P(N = n) = (1-ρ)ρⁿ, n ≥ 0, by inversion.
pub fn geometric(log_rho: f64, u: f64) -> u64 {
    let n = (u.ln() / log_rho).floor();
    if n >= u64::MAX as f64 {
        u64::MAX
    } else {
        n as u64
    }
}

/// Conditional Monte Carlo estimator of P(W > x) = Σ (1-ρ)ρⁿ P(S_n > x):
/// each replication returns N F̄(max(x - S_{N-1}, M_{N-1})).
pub fn conditional_mc_estimate<D: TailLaw + Sync>(
    dist: &D,
    rho: f64,
    x: f64,
    reps: u64,
    seed: u64,
) -> Result<SimulationEstimate> {
    check_rho(rho)?;
    check_x(x)?;
    check_reps(reps)?;
    let log_rho = rho.ln();
    let w = replicate(reps, seed, |rng| {
        let n = geometric(log_rho, open_uniform(rng));
        if n == 0 {
            return 0.0;
        }
        let (mut sum, mut max) = (0.0f64, 0.0f64);
        for _ in 1..n {
            let v = dist.inverse_tail(open_uniform(rng));
            sum += v;
            max = max.max(v);
        }
        n as f64 * dist.tail((x - sum).max(max))
    });
    Ok(finish(w, reps, seed))
}

/// Crude estimator of P(S_n > x).
pub fn naive_rw_mc<D: TailLaw + Sync>(
    dist: &D,
    n: u64,
    x: f64,
    reps: u64,
    seed: u64,
) -> Result<SimulationEstimate> {
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            domain: "n >= 1",
        });
    }
    check_reps(reps)?;
    let w = replicate(reps, seed, |rng| {
        let mut s = 0.0;
        for _ in 0..n {
            s += dist.inverse_tail(open_uniform(rng));
        }
        if s > x {
            1.0
        } else {
            0.0
        }
    });
    Ok(finish(w, reps, seed))
}

/// Runs `f` on a dedicated pool with `threads` workers.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "x",
            value: x,
            domain: "[0, inf)",
        })
    }
}

fn check_reps(reps: u64) -> Result<()> {
    if reps == 0 {
        Err(Error::InvalidParameter {
            name: "reps",
            value: 0.0,
            reason: "at least one replication is required",
        })
    } else {
        Ok(())
    }
}
