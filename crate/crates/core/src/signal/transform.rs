use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::FrequencyGrid;
use crate::error::{Error, Result};

/// Time-domain signal sampled at `t_k = k t_max / N_t`, `k = 0..N_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeDomainSignal {
    pub grid: FrequencyGrid,
    pub values: Vec<Complex64>,
}

impl TimeDomainSignal {
    /// Sample spacing `t_max / N_t`.
    pub fn delta_t_s(&self) -> f64 {
        self.grid.t_max_s() / self.values.len() as f64
    }

    /// `|y(t_k)|^2`.
    pub fn power(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Reusable length-`N` transform pair between the frequency grid and the time grid.
///
/// `inverse` evaluates `y_k = (1/N) Σ_n Y_n exp(j2π n k / N)`, which is the
/// continuous-time inverse transform at `t_k = k t_max / N`. `forward` is its
/// exact inverse, `Y_n = Σ_k y_k exp(-j2π n k / N)`.
pub struct TimeTransform {
    n: usize,
    #[cfg(feature = "std")]
    inverse: alloc::sync::Arc<dyn rustfft::Fft<f64>>,
    #[cfg(feature = "std")]
    forward: alloc::sync::Arc<dyn rustfft::Fft<f64>>,
    #[cfg(not(feature = "std"))]
    twiddles: Vec<Complex64>,
}

impl core::fmt::Debug for TimeTransform {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("TimeTransform").field("n", &self.n).finish()
    }
}

impl TimeTransform {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "transform length must be positive");
        #[cfg(feature = "std")]
        {
            let mut planner = rustfft::FftPlanner::new();
            Self { n, inverse: planner.plan_fft_inverse(n), forward: planner.plan_fft_forward(n) }
        }
        #[cfg(not(feature = "std"))]
        {
            let twiddles = (0..n)
                .map(|m| {
                    let phase = crate::math::TAU * m as f64 / n as f64;
                    Complex64::new(crate::math::cos(phase), crate::math::sin(phase))
                })
                .collect();
            Self { n, twiddles }
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Frequency samples to time samples, scaled by `1/N`.
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(spectrum.len(), self.n);
        let scale = 1.0 / self.n as f64;
        let mut out = self.unscaled(spectrum, true);
        out.iter_mut().for_each(|z| *z *= scale);
        out
    }

    /// Time samples to frequency samples.
    pub fn forward(&self, signal: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(signal.len(), self.n);
        self.unscaled(signal, false)
    }

    #[cfg(feature = "std")]
    fn unscaled(&self, input: &[Complex64], inverse: bool) -> Vec<Complex64> {
        let plan = if inverse { &self.inverse } else { &self.forward };
        let mut buf = input.to_vec();
        let mut scratch = alloc::vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(&mut buf, &mut scratch);
        buf
    }

    #[cfg(not(feature = "std"))]
    fn unscaled(&self, input: &[Complex64], inverse: bool) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, x) in input.iter().enumerate() {
                    let w = self.twiddles[(m * k) % n];
                    acc += x * if inverse { w } else { w.conj() };
                }
                acc
            })
            .collect()
    }
}

fn check_row(row: &[Complex64], grid: &FrequencyGrid) -> Result<()> {
    if row.len() != grid.n_s() {
        return Err(Error::DimensionMismatch { expected: grid.n_s(), found: row.len() });
    }
    if let Some(n) = row.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::InvalidData(format!("non-finite sample at frequency index {n}")));
    }
    Ok(())
}

/// Inverse-transform one transfer-function row onto `N_t = N_s` time samples.
pub fn to_time_domain(row: &[Complex64], grid: &FrequencyGrid) -> Result<TimeDomainSignal> {
    check_row(row, grid)?;
    let values = TimeTransform::new(grid.n_s()).inverse(row);
    Ok(TimeDomainSignal { grid: *grid, values })
}

/// Frequency samples whose time-domain transform is `sig`.
pub fn to_frequency_domain(sig: &TimeDomainSignal) -> Vec<Complex64> {
    TimeTransform::new(sig.values.len()).forward(&sig.values)
}
