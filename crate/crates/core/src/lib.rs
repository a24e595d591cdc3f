//! Empirical mutual-information rates for model-free MIMO links.
//!
//! This crate evaluates how much information actually flowed between a
//! realized input block and a realized output block, with no model of the
//! channel in between: the empirical rate of [`rate`] is the Gaussian
//! mutual-information formula with empirical correlation matrices in place
//! of covariances. Around that sit the pieces a random-coding scheme needs
//! and the experiments that verify them at desk scale:
//!
//! * [`linalg`] — dense matrices, rank-revealing Gram-Schmidt, Cholesky
//!   coloring, log-domain determinants.
//! * [`rng`] — seeded substreams; every draw is reproducible and safe to
//!   parallelize over trials.
//! * [`rate`] — the rate function in two independently computed forms,
//!   its covariance variant, and the scalar shortcut.
//! * [`bounds`] — the admissible exponent range, the closed-form tail
//!   constant, the tail bound, the rate threshold a target error implies,
//!   and per-column moment bounds.
//! * [`channels`] — linear Gaussian, non-Gaussian, signal-dependent, and
//!   deterministic channel models, plus analytic Gaussian references.
//! * [`codec`] — the seeded Gaussian codebook and the
//!   maximum-empirical-rate decoder.
//! * [`experiments`] — seeded Monte Carlo verification of the tail bound,
//!   the end-to-end coding guarantee, convergence to the Gaussian
//!   reference, the innovation chi-squared structure, the tilted-moment
//!   bounds, and the blocking transform.
//!
//! The `parallel` feature (on by default) distributes experiment trials
//! over a rayon pool; results are identical with it off, with it on, and
//! at any worker count.

pub mod bounds;
pub mod channels;
pub mod codec;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod linalg;
pub mod rate;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
