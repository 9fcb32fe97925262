use alloc::format;

use crate::error::{Error, Result};

/// Uniform frequency grid of a vector network analyzer sweep.
///
/// Only `n_s` and `Δf` enter the time-domain transform; the start frequency is
/// carried for models that need absolute frequencies (free-space loss).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    n_s: usize,
    bandwidth_hz: f64,
    f_start_hz: f64,
}

impl FrequencyGrid {
    pub fn new(n_s: usize, bandwidth_hz: f64) -> Result<Self> {
        Self::with_start(n_s, bandwidth_hz, 0.0)
    }

    pub fn with_start(n_s: usize, bandwidth_hz: f64, f_start_hz: f64) -> Result<Self> {
        if n_s < 2 {
            return Err(Error::InvalidData(format!("frequency grid needs n_s >= 2, got {n_s}")));
        }
        if !(bandwidth_hz.is_finite() && bandwidth_hz > 0.0) {
            return Err(Error::InvalidData(format!("bandwidth must be finite and > 0, got {bandwidth_hz}")));
        }
        if !(f_start_hz.is_finite() && f_start_hz >= 0.0) {
            return Err(Error::InvalidData(format!("start frequency must be finite and >= 0, got {f_start_hz}")));
        }
        Ok(Self { n_s, bandwidth_hz, f_start_hz })
    }

    /// 58-62 GHz, 801 points: Δf = 5 MHz, t_max = 200 ns.
    pub fn mmwave_default() -> Self {
        Self { n_s: 801, bandwidth_hz: 4e9, f_start_hz: 58e9 }
    }

    #[inline]
    pub fn n_s(&self) -> usize {
        self.n_s
    }

    #[inline]
    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    #[inline]
    pub fn f_start_hz(&self) -> f64 {
        self.f_start_hz
    }

    #[inline]
    pub fn delta_f_hz(&self) -> f64 {
        self.bandwidth_hz / (self.n_s - 1) as f64
    }

    #[inline]
    pub fn t_max_s(&self) -> f64 {
        1.0 / self.delta_f_hz()
    }

    /// Absolute frequency of sample `n`.
    #[inline]
    pub fn frequency_hz(&self, n: usize) -> f64 {
        self.f_start_hz + n as f64 * self.delta_f_hz()
    }

    /// Spacing of the `N_t = N_s` time samples.
    #[inline]
    pub fn delta_t_s(&self) -> f64 {
        self.t_max_s() / self.n_s as f64
    }

    /// Same sampling, ignoring the start frequency.
    pub fn same_sampling(&self, other: &Self) -> bool {
        self.n_s == other.n_s && self.bandwidth_hz == other.bandwidth_hz
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_matches_measurement_setup() {
        let g = FrequencyGrid::mmwave_default();
        assert_eq!(g.delta_f_hz(), 5e6);
        assert!((g.t_max_s() - 200e-9).abs() < 1e-21);
        assert_eq!(g.frequency_hz(800), 62e9);
    }

    #[test]
    fn t_max_times_delta_f_is_one() {
        for &(n, b) in &[(2usize, 1.0), (801, 4e9), (1001, 3.3e9), (17, 123.456)] {
            let g = FrequencyGrid::new(n, b).unwrap();
            assert_eq!(g.delta_f_hz(), b / (n - 1) as f64);
            assert!((g.t_max_s() * g.delta_f_hz() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(FrequencyGrid::new(1, 1e9).is_err());
        assert!(FrequencyGrid::new(10, 0.0).is_err());
        assert!(FrequencyGrid::new(10, f64::NAN).is_err());
        assert!(FrequencyGrid::with_start(10, 1e9, -1.0).is_err());
    }
}
