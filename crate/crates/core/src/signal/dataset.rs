use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::FrequencyGrid;
use crate::error::{Error, Result};

/// `N_obs x N_s` complex transfer-function samples, one row per realization.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunctionDataset {
    grid: FrequencyGrid,
    n_obs: usize,
    samples: Vec<Complex64>,
}

impl TransferFunctionDataset {
    /// Wrap row-major samples. Every entry must be finite.
    pub fn new(grid: FrequencyGrid, samples: Vec<Complex64>) -> Result<Self> {
        let n_s = grid.n_s();
        if samples.is_empty() || samples.len() % n_s != 0 {
            return Err(Error::InvalidData(format!(
                "sample count {} is not a positive multiple of n_s = {n_s}",
                samples.len()
            )));
        }
        if let Some(pos) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidData(format!(
                "non-finite sample at realization {}, frequency index {}",
                pos / n_s,
                pos % n_s
            )));
        }
        Ok(Self { grid, n_obs: samples.len() / n_s, samples })
    }

    pub fn from_rows<R: AsRef<[Complex64]>>(grid: FrequencyGrid, rows: &[R]) -> Result<Self> {
        let mut samples = Vec::with_capacity(rows.len() * grid.n_s());
        for r in rows {
            let r = r.as_ref();
            if r.len() != grid.n_s() {
                return Err(Error::DimensionMismatch { expected: grid.n_s(), found: r.len() });
            }
            samples.extend_from_slice(r);
        }
        Self::new(grid, samples)
    }

    /// Stack datasets on a common sampling grid.
    pub fn concat(parts: &[TransferFunctionDataset]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidData("nothing to concatenate".into()))?;
        let mut samples = Vec::new();
        for p in parts {
            if !p.grid.same_sampling(&first.grid) {
                return Err(Error::InvalidData("datasets use different frequency grids".into()));
            }
            samples.extend_from_slice(&p.samples);
        }
        Self::new(first.grid, samples)
    }

    #[inline]
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    #[inline]
    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    #[inline]
    pub fn row(&self, k: usize) -> &[Complex64] {
        let n_s = self.grid.n_s();
        &self.samples[k * n_s..(k + 1) * n_s]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[Complex64]> + '_ {
        self.samples.chunks_exact(self.grid.n_s())
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Keep the first `n` realizations.
    pub fn truncated(mut self, n: usize) -> Result<Self> {
        if n == 0 || n > self.n_obs {
            return Err(Error::InvalidData(format!("cannot keep {n} of {} realizations", self.n_obs)));
        }
        self.samples.truncate(n * self.grid.n_s());
        self.n_obs = n;
        Ok(self)
    }

    /// Rows picked by index, in the given order; indices may repeat.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut samples = Vec::with_capacity(indices.len() * self.grid.n_s());
        for &k in indices {
            if k >= self.n_obs {
                return Err(Error::InvalidData(format!("row {k} out of range ({} rows)", self.n_obs)));
            }
            samples.extend_from_slice(self.row(k));
        }
        Self::new(self.grid, samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> FrequencyGrid {
        FrequencyGrid::new(4, 3.0).unwrap()
    }

    #[test]
    fn rejects_non_finite_and_ragged() {
        let mut s = alloc::vec![Complex64::new(1.0, 0.0); 8];
        s[5] = Complex64::new(f64::INFINITY, 0.0);
        let err = TransferFunctionDataset::new(grid(), s).unwrap_err();
        assert!(matches!(err, Error::InvalidData(ref m) if m.contains("realization 1")));
        assert!(TransferFunctionDataset::new(grid(), alloc::vec![Complex64::new(0.0, 0.0); 7]).is_err());
        assert!(TransferFunctionDataset::new(grid(), Vec::new()).is_err());
    }

    #[test]
    fn select_and_concat() {
        let rows: Vec<Vec<Complex64>> =
            (0..3).map(|k| alloc::vec![Complex64::new(k as f64, 0.0); 4]).collect();
        let ds = TransferFunctionDataset::from_rows(grid(), &rows).unwrap();
        assert_eq!(ds.n_obs(), 3);
        let picked = ds.select_rows(&[2, 2, 0]).unwrap();
        assert_eq!(picked.row(1)[0].re, 2.0);
        let both = TransferFunctionDataset::concat(&[ds.clone(), picked]).unwrap();
        assert_eq!(both.n_obs(), 6);
        assert_eq!(ds.truncated(1).unwrap().n_obs(), 1);
    }
}
