//! Likelihood-free calibration of stochastic radio channel models.
//!
//! Transfer-function measurements are mapped to log temporal moments, simulated
//! and observed moment sets are compared with the maximum mean discrepancy, and a
//! population Monte Carlo ABC loop with local-linear regression adjustment turns
//! those comparisons into posterior samples.
//!
//! The crate is `no_std` with `alloc`. The default `std` feature swaps the direct
//! DFT for an FFT backend, which agrees with it up to rounding; `parallel` evaluates
//! candidates on a rayon pool and leaves every result bit-identical.
//!
//! Module map:
//! - [`signal`]: frequency grid, time-domain transform, temporal moments, APDP,
//!   standardized moments, SNR.
//! - [`kernel`]: squared-exponential kernel, median heuristic, unbiased MMD²,
//!   closed-form Gaussian MMD², transfer-function kernel.
//! - [`models`]: Saleh-Valenzuela and propagation-graph simulators, additive noise.
//! - [`abc`]: priors, summaries, rejection, regression adjustment, PMC loop.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod abc;
pub mod error;
pub mod kernel;
pub mod matrix;
pub mod models;
pub mod rng;
pub mod signal;

mod math;

pub use error::{Error, ErrorKind, Result};
pub use matrix::RealMatrix;
