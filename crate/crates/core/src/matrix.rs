use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense row-major real matrix. Rows are points (realizations, particles).
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: alloc::vec![0.0; rows * cols] }
    }

    /// Stack equal-length rows. An empty iterator gives a `0 x 0` matrix.
    pub fn from_rows<R, I>(rows: I) -> Result<Self>
    where
        R: AsRef<[f64]>,
        I: IntoIterator<Item = R>,
    {
        let mut data = Vec::new();
        let mut cols = None;
        let mut n = 0;
        for row in rows {
            let row = row.as_ref();
            match cols {
                None => cols = Some(row.len()),
                Some(c) if c != row.len() => {
                    return Err(Error::DimensionMismatch { expected: c, found: row.len() })
                }
                Some(_) => {}
            }
            data.extend_from_slice(row);
            n += 1;
        }
        Ok(Self { rows: n, cols: cols.unwrap_or(0), data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.iter_rows().map(|r| r[j]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Column means.
    pub fn column_means(&self) -> Vec<f64> {
        let mut means = alloc::vec![0.0; self.cols];
        for row in self.iter_rows() {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        let n = self.rows as f64;
        means.iter_mut().for_each(|m| *m /= n);
        means
    }

    /// Unbiased column variances (divisor `rows - 1`); zero for a single row.
    pub fn column_variances(&self) -> Vec<f64> {
        let means = self.column_means();
        let mut var = alloc::vec![0.0; self.cols];
        if self.rows < 2 {
            return var;
        }
        for row in self.iter_rows() {
            for ((v, x), m) in var.iter_mut().zip(row).zip(&means) {
                let d = x - m;
                *v += d * d;
            }
        }
        let denom = (self.rows - 1) as f64;
        var.iter_mut().for_each(|v| *v /= denom);
        var
    }

    /// Scale every entry, returning a new matrix.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * factor).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_rows_rejects_ragged_input() {
        let err = RealMatrix::from_rows([&[1.0, 2.0][..], &[3.0][..]]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 1 });
    }

    #[test]
    fn column_statistics() {
        let m = RealMatrix::from_rows([[1.0, 10.0], [3.0, 10.0], [5.0, 10.0]]).unwrap();
        assert_eq!(m.column_means(), [3.0, 10.0]);
        assert_eq!(m.column_variances(), [4.0, 0.0]);
        assert_eq!(m.column(0), [1.0, 3.0, 5.0]);
    }
}
