//! Tail approximations for the steady-state waiting time of an M/G/1 queue
//! whose service times are subexponential.
//!
//! The waiting time is a geometric compound of draws from the integrated
//! tail F of the service time, P(W > x) = Σ (1-ρ)ρⁿ P(S_n > x). This crate
//! provides two uniform approximations of that probability, Z_κ and A_κ,
//! along with the big-jump random-walk approximations, the classical
//! heavy-tail and heavy-traffic approximations, and Monte Carlo oracles.
//!
//! ```
//! use mg1tail_core::{approximate, IntegratedTailModel, QueueModel};
//!
//! let qm = QueueModel::new(IntegratedTailModel::lognormal(0.0, 1.0)?)?;
//! let rep = approximate(&qm, 0.9, 50.0)?;
//! assert!(rep.log_a < 0.0 && rep.log_z < 0.0);
//! # Ok::<(), mg1tail_core::Error>(())
//! ```

pub mod approx;
pub mod config;
pub mod cramer_poly;
pub mod dist;
pub mod error;
pub mod model;
pub mod quad;
pub mod rw;
pub mod sim;
pub mod special;
pub mod thresholds;

pub use approx::{
    a_kappa, approximate, evaluate_grid, evaluate_grid_with, gauss_geom_expectation, heavy_tail, heavy_traffic,
    z_kappa, ApproximationReport, Approximator, Flags, HeavySumMode, Terms,
};
pub use config::ModelSpec;
pub use cramer_poly::LambdaPoly;
pub use dist::{DiagnosticReport, Family, HazardIndex, IntegratedTailModel, TailLaw};
pub use error::{Error, Result};
pub use model::{build_queue_model, cramer_coefficients, moments_to_cumulants, QueueModel};
pub use rw::{Branch, RwApprox, RwTail};
pub use sim::{conditional_mc_estimate, naive_rw_mc, with_threads, SimulationEstimate};
pub use thresholds::{right_inverse, Region, ThresholdRow, ThresholdSet};
