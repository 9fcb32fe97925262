//! Deterministic signal processing on transfer-function measurements.
//!
//! A measurement is `N_s` complex samples over bandwidth `B`. The time-domain
//! signal is its discrete-frequency, continuous-time inverse Fourier transform,
//! periodic in `t_max = 1/Δf`, and is sampled here at `N_t = N_s` points on
//! `[0, t_max)`. Temporal moments are left Riemann sums on that grid.

mod dataset;
mod grid;
mod moments;
mod transform;

pub use dataset::TransferFunctionDataset;
pub use grid::FrequencyGrid;
pub use moments::{
    apdp, dataset_moments, log_moment_matrix, log_moments, snr_db, standardized_moments,
    temporal_moments, LogMomentMatrix, ValidationStats,
};
pub use transform::{to_frequency_domain, to_time_domain, TimeDomainSignal, TimeTransform};
