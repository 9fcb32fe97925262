use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{FrequencyGrid, TimeDomainSignal, TimeTransform, TransferFunctionDataset};
use crate::error::{Error, Result};
use crate::math::{log, log10, sqrt};
use crate::matrix::RealMatrix;

/// `N x I` matrix of log temporal moments, row `k` = `[ln m0, ..., ln m(I-1)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogMomentMatrix {
    i_moments: usize,
    rows: RealMatrix,
}

impl LogMomentMatrix {
    pub fn new(rows: RealMatrix) -> Result<Self> {
        if rows.cols() == 0 {
            return Err(Error::InvalidData("log-moment matrix needs at least one column".into()));
        }
        if rows.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("log-moment matrix has non-finite entries".into()));
        }
        Ok(Self { i_moments: rows.cols(), rows })
    }

    pub fn i_moments(&self) -> usize {
        self.i_moments
    }

    pub fn len(&self) -> usize {
        self.rows.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.rows() == 0
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.rows
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.rows
    }
}

/// Received power, mean delay and RMS delay spread of one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationStats {
    pub p0: f64,
    pub mean_delay_s: f64,
    pub rms_delay_spread_s: f64,
}

/// `m_i = Σ_k Δt t_k^i p_k` for `i = 0..count`, the left Riemann sum of `∫ t^i |y|^2 dt`.
fn moments_from_power(power: impl Iterator<Item = f64>, dt: f64, count: usize) -> Vec<f64> {
    let mut m = alloc::vec![0.0; count];
    for (k, p) in power.enumerate() {
        let t = k as f64 * dt;
        let mut w = dt * p;
        for mi in m.iter_mut() {
            *mi += w;
            w *= t;
        }
    }
    m
}

/// Temporal moments `m0 .. m(I-1)` of a time-domain signal.
pub fn temporal_moments(sig: &TimeDomainSignal, i_moments: usize) -> Result<Vec<f64>> {
    if i_moments == 0 {
        return Err(Error::InvalidParameter("need at least one temporal moment".into()));
    }
    if sig.values.is_empty() {
        return Err(Error::InvalidData("empty time-domain signal".into()));
    }
    Ok(moments_from_power(sig.values.iter().map(|z| z.norm_sqr()), sig.delta_t_s(), i_moments))
}

fn row_moments(transform: &TimeTransform, row: &[Complex64], grid: &FrequencyGrid, i_moments: usize) -> Vec<f64> {
    let y = transform.inverse(row);
    moments_from_power(y.iter().map(|z| z.norm_sqr()), grid.delta_t_s(), i_moments)
}

/// Raw temporal moments of every realization, `N_obs x I`.
pub fn dataset_moments(ds: &TransferFunctionDataset, i_moments: usize) -> Result<RealMatrix> {
    if i_moments == 0 {
        return Err(Error::InvalidParameter("need at least one temporal moment".into()));
    }
    let grid = ds.grid();
    let transform = TimeTransform::new(grid.n_s());
    let mut data = Vec::with_capacity(ds.n_obs() * i_moments);
    for row in ds.rows() {
        data.extend(row_moments(&transform, row, grid, i_moments));
    }
    RealMatrix::new(ds.n_obs(), i_moments, data)
}

/// Log moments of a single realization, checking positivity.
pub fn log_moments(
    transform: &TimeTransform,
    row: &[Complex64],
    grid: &FrequencyGrid,
    i_moments: usize,
    row_index: usize,
) -> Result<Vec<f64>> {
    let mut m = row_moments(transform, row, grid, i_moments);
    for (i, v) in m.iter_mut().enumerate() {
        if !(*v > 0.0 && v.is_finite()) {
            return Err(Error::DegenerateSignal { row: row_index, moment: i, value: *v });
        }
        *v = log(*v);
    }
    Ok(m)
}

/// Map every realization to its log temporal moments.
pub fn log_moment_matrix(ds: &TransferFunctionDataset, i_moments: usize) -> Result<LogMomentMatrix> {
    if i_moments == 0 {
        return Err(Error::InvalidParameter("need at least one temporal moment".into()));
    }
    let grid = ds.grid();
    let transform = TimeTransform::new(grid.n_s());
    let mut data = Vec::with_capacity(ds.n_obs() * i_moments);
    for (k, row) in ds.rows().enumerate() {
        data.extend(log_moments(&transform, row, grid, i_moments, k)?);
    }
    LogMomentMatrix::new(RealMatrix::new(ds.n_obs(), i_moments, data)?)
}

/// Averaged power delay profile: mean of `|y(t_k)|^2` over realizations.
pub fn apdp(ds: &TransferFunctionDataset) -> Vec<f64> {
    let n_s = ds.grid().n_s();
    let transform = TimeTransform::new(n_s);
    let mut acc = alloc::vec![0.0; n_s];
    for row in ds.rows() {
        for (a, z) in acc.iter_mut().zip(transform.inverse(row)) {
            *a += z.norm_sqr();
        }
    }
    let n = ds.n_obs() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    acc
}

/// Received power, mean delay and RMS delay spread from `m0, m1, m2`.
///
/// A negative radicand within `1e-12` of the larger of its two terms is treated
/// as rounding and clamped to zero.
pub fn standardized_moments(m: &[f64]) -> Result<ValidationStats> {
    if m.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: m.len() });
    }
    let (m0, m1, m2) = (m[0], m[1], m[2]);
    if !(m0 > 0.0 && m0.is_finite() && m1.is_finite() && m2.is_finite()) {
        return Err(Error::NumericalDomain(format!("m0 must be positive and finite, got {m0}")));
    }
    let mean = m1 / m0;
    let second = m2 / m0;
    let radicand = second - mean * mean;
    let scale = second.abs().max(mean * mean);
    let radicand = if radicand >= 0.0 {
        radicand
    } else if radicand >= -1e-12 * scale {
        0.0
    } else {
        return Err(Error::NumericalDomain(format!("negative delay-spread radicand {radicand:e}")));
    };
    Ok(ValidationStats { p0: m0, mean_delay_s: mean, rms_delay_spread_s: sqrt(radicand) })
}

/// `10 log10(m0_mean * B / σ_W²)` in dB.
pub fn snr_db(mean_m0_noiseless: f64, bandwidth_hz: f64, sigma_w2: f64) -> Result<f64> {
    for (name, v) in [("mean m0", mean_m0_noiseless), ("bandwidth", bandwidth_hz), ("noise variance", sigma_w2)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NumericalDomain(format!("{name} must be positive and finite, got {v}")));
        }
    }
    Ok(10.0 * log10(mean_m0_noiseless * bandwidth_hz / sigma_w2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::to_time_domain;
    use crate::math::{cos, exp, sin};

    fn unit_power_dataset(n_s: usize, t_max: f64, rows: usize) -> TransferFunctionDataset {
        let grid = FrequencyGrid::new(n_s, (n_s - 1) as f64 / t_max).unwrap();
        let mut samples = alloc::vec![Complex64::new(0.0, 0.0); n_s * rows];
        for r in 0..rows {
            samples[r * n_s] = Complex64::new(n_s as f64, 0.0);
        }
        TransferFunctionDataset::new(grid, samples).unwrap()
    }

    #[test]
    fn unit_power_monomial_integrals() {
        // Left Riemann sums of t^i on [0, T) with N points undershoot by O(1/N).
        let t = 200e-9;
        let n = 801;
        let ds = unit_power_dataset(n, t, 1);
        let sig = to_time_domain(ds.row(0), ds.grid()).unwrap();
        let m = temporal_moments(&sig, 3).unwrap();
        assert!((m[0] - t).abs() < 1e-12 * t);
        let tol = 2.0 / n as f64;
        assert!((m[1] / (t * t / 2.0) - 1.0).abs() < tol);
        assert!((m[2] / (t * t * t / 3.0) - 1.0).abs() < tol);
    }

    #[test]
    fn scaling_multiplies_moments_by_gain_squared() {
        let grid = FrequencyGrid::new(64, 1e9).unwrap();
        let row: Vec<Complex64> = (0..64).map(|n| Complex64::new(exp(-(n as f64) / 9.0), sin(n as f64))).collect();
        let c = Complex64::new(0.3, -1.7);
        let scaled: Vec<Complex64> = row.iter().map(|z| z * c).collect();
        let a = temporal_moments(&to_time_domain(&row, &grid).unwrap(), 4).unwrap();
        let b = temporal_moments(&to_time_domain(&scaled, &grid).unwrap(), 4).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((y / x - c.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn log_moment_row_for_unit_power() {
        let t = 200e-9;
        let ds = unit_power_dataset(801, t, 1);
        let z = log_moment_matrix(&ds, 4).unwrap();
        assert_eq!(z.len(), 1);
        let expected = [log(2e-7), log(2e-14), log(8.0e-21 / 3.0), log(16e-28 / 4.0)];
        assert!((z.matrix().get(0, 0) - expected[0]).abs() < 1e-12);
        for i in 1..4 {
            // ln of the Riemann factor (1 - O(1/N))
            assert!((z.matrix().get(0, i) - expected[i]).abs() < 2.0 * i as f64 / 801.0);
        }
    }

    #[test]
    fn zero_dataset_is_degenerate() {
        let grid = FrequencyGrid::new(16, 1e9).unwrap();
        let ds = TransferFunctionDataset::new(grid, alloc::vec![Complex64::new(0.0, 0.0); 48]).unwrap();
        assert!(matches!(log_moment_matrix(&ds, 4), Err(Error::DegenerateSignal { row: 0, moment: 0, .. })));
    }

    #[test]
    fn degenerate_error_names_the_row() {
        let grid = FrequencyGrid::new(8, 1e9).unwrap();
        let mut samples = alloc::vec![Complex64::new(1.0, 0.5); 24];
        samples[16..].iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        let ds = TransferFunctionDataset::new(grid, samples).unwrap();
        assert!(matches!(log_moment_matrix(&ds, 1), Err(Error::DegenerateSignal { row: 2, moment: 0, .. })));
    }

    #[test]
    fn log_moment_shape() {
        let grid = FrequencyGrid::new(32, 1e9).unwrap();
        let samples: Vec<Complex64> =
            (0..5 * 32).map(|k| Complex64::new(cos(k as f64 * 0.37), sin(k as f64 * 0.11) + 0.5)).collect();
        let ds = TransferFunctionDataset::new(grid, samples).unwrap();
        let z = log_moment_matrix(&ds, 4).unwrap();
        assert_eq!((z.matrix().rows(), z.matrix().cols()), (5, 4));
        assert_eq!(z.i_moments(), 4);
    }

    #[test]
    fn apdp_is_a_mean_over_realizations() {
        let grid = FrequencyGrid::new(16, 1e9).unwrap();
        let samples: Vec<Complex64> =
            (0..3 * 16).map(|k| Complex64::new(cos(k as f64 * 0.9), sin(k as f64 * 0.4))).collect();
        let ds = TransferFunctionDataset::new(grid, samples).unwrap();

        let single = ds.select_rows(&[1]).unwrap();
        let direct = to_time_domain(single.row(0), &grid).unwrap().power();
        assert_eq!(apdp(&single), direct);

        let base = apdp(&ds);
        let permuted = apdp(&ds.select_rows(&[2, 0, 1]).unwrap());
        let doubled = apdp(&ds.select_rows(&[0, 1, 2, 0, 1, 2]).unwrap());
        for k in 0..16 {
            assert!((base[k] - permuted[k]).abs() <= 1e-15 * base[k].abs().max(1e-300));
            assert!((base[k] - doubled[k]).abs() <= 1e-15 * base[k].abs().max(1e-300));
        }
    }

    #[test]
    fn standardized_moments_of_uniform_density() {
        let t = 3.0;
        let s = standardized_moments(&[t, t * t / 2.0, t * t * t / 3.0]).unwrap();
        assert_eq!(s.p0, t);
        assert_eq!(s.mean_delay_s, t / 2.0);
        assert!((s.rms_delay_spread_s - t / sqrt(12.0)).abs() < 1e-15);
    }

    #[test]
    fn standardized_moments_of_point_mass() {
        let s = standardized_moments(&[1.0, 0.5, 0.25]).unwrap();
        assert_eq!(s.mean_delay_s, 0.5);
        assert_eq!(s.rms_delay_spread_s, 0.0);
    }

    #[test]
    fn standardized_moments_domain_errors() {
        assert!(matches!(standardized_moments(&[1.0, 0.5, 0.2]), Err(Error::NumericalDomain(_))));
        assert!(matches!(standardized_moments(&[0.0, 0.5, 0.2]), Err(Error::NumericalDomain(_))));
        assert!(matches!(standardized_moments(&[1.0, 0.5]), Err(Error::TooFewPoints { .. })));
        // rounding-level negativity is clamped
        let s = standardized_moments(&[1.0, 0.1, 0.01 * (1.0 - 1e-14)]).unwrap();
        assert_eq!(s.rms_delay_spread_s, 0.0);
    }

    #[test]
    fn snr_levels() {
        assert_eq!(snr_db(1e-9, 1e9, 1.0).unwrap(), 0.0);
        assert!((snr_db(1e-7, 1e9, 1.0).unwrap() - 20.0).abs() < 1e-12);
        assert!(snr_db(0.0, 1e9, 1.0).is_err());
        assert!(snr_db(1.0, -1.0, 1.0).is_err());
        assert!(snr_db(1.0, 1.0, 0.0).is_err());
    }
}
