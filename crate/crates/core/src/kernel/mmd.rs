use core::cmp::Ordering;

use super::se::{se_from_sq, sq_dist, Lengthscale};
use crate::error::{Error, Result};
use crate::matrix::RealMatrix;

// Rows per partial sum. Sums are accumulated per block and blocks are added in
// order, so the result does not depend on how blocks are scheduled.
const BLOCK_ROWS: usize = 64;

/// Unbiased estimate of MMD² between two point sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mmd2Estimate {
    /// May be negative.
    pub value: f64,
    pub n_x: usize,
    pub n_y: usize,
    pub lengthscale: Lengthscale,
}

fn check_points(x: &RealMatrix) -> Result<()> {
    if x.rows() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: x.rows() });
    }
    if x.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("point set has non-finite entries".into()));
    }
    Ok(())
}

/// Mean of `k(x_i, x_j)` over ordered pairs `i != j`.
fn within_mean(x: &RealMatrix, l2: f64) -> f64 {
    let n = x.rows();
    let mut total = 0.0;
    for start in (0..n).step_by(BLOCK_ROWS) {
        let mut partial = 0.0;
        for i in start..(start + BLOCK_ROWS).min(n) {
            let xi = x.row(i);
            for j in i + 1..n {
                partial += se_from_sq(sq_dist(xi, x.row(j)), l2);
            }
        }
        total += partial;
    }
    2.0 * total / (n as f64 * (n - 1) as f64)
}

// Total order on point sets: row count, then entries lexicographically.
fn canonical_cmp(a: &RealMatrix, b: &RealMatrix) -> Ordering {
    a.rows().cmp(&b.rows()).then_with(|| {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Mean of `k(x_i, y_j)` over all pairs. The outer loop always runs over the
/// canonically smaller set, which makes the sum bit-symmetric in its arguments.
fn cross_mean(x: &RealMatrix, y: &RealMatrix, l2: f64) -> f64 {
    let (outer, inner) = if canonical_cmp(x, y) == Ordering::Greater { (y, x) } else { (x, y) };
    let (n, m) = (outer.rows(), inner.rows());
    let mut total = 0.0;
    for start in (0..n).step_by(BLOCK_ROWS) {
        let mut partial = 0.0;
        for i in start..(start + BLOCK_ROWS).min(n) {
            let oi = outer.row(i);
            for j in 0..m {
                partial += se_from_sq(sq_dist(oi, inner.row(j)), l2);
            }
        }
        total += partial;
    }
    total / (n as f64 * m as f64)
}

#[inline]
fn combine(within_x: f64, within_y: f64, cross: f64) -> f64 {
    (within_x + within_y) - 2.0 * cross
}

/// Unbiased MMD² estimate with the squared-exponential kernel.
///
/// `x` and `y` may have different sizes. Symmetric in its arguments bit for bit.
pub fn mmd2_unbiased(x: &RealMatrix, y: &RealMatrix, l: Lengthscale) -> Result<Mmd2Estimate> {
    check_points(x)?;
    check_points(y)?;
    if x.cols() != y.cols() {
        return Err(Error::DimensionMismatch { expected: x.cols(), found: y.cols() });
    }
    let l2 = l.get() * l.get();
    let value = combine(within_mean(x, l2), within_mean(y, l2), cross_mean(x, y, l2));
    Ok(Mmd2Estimate { value, n_x: x.rows(), n_y: y.rows(), lengthscale: l })
}

/// Fixed reference set with its within-set kernel mean cached.
///
/// `reference.mmd2(y)` equals `mmd2_unbiased(points, y, l)` bit for bit.
#[derive(Debug, Clone)]
pub struct MmdReference {
    points: RealMatrix,
    lengthscale: Lengthscale,
    within: f64,
}

impl MmdReference {
    pub fn new(points: RealMatrix, lengthscale: Lengthscale) -> Result<Self> {
        check_points(&points)?;
        let l2 = lengthscale.get() * lengthscale.get();
        let within = within_mean(&points, l2);
        Ok(Self { points, lengthscale, within })
    }

    /// Lengthscale set from the reference points by the median heuristic.
    pub fn with_median_heuristic(points: RealMatrix) -> Result<Self> {
        let l = super::median_heuristic(&points)?;
        Self::new(points, l)
    }

    pub fn lengthscale(&self) -> Lengthscale {
        self.lengthscale
    }

    pub fn points(&self) -> &RealMatrix {
        &self.points
    }

    pub fn mmd2(&self, y: &RealMatrix) -> Result<Mmd2Estimate> {
        check_points(y)?;
        if y.cols() != self.points.cols() {
            return Err(Error::DimensionMismatch { expected: self.points.cols(), found: y.cols() });
        }
        let l2 = self.lengthscale.get() * self.lengthscale.get();
        let value = combine(self.within, within_mean(y, l2), cross_mean(&self.points, y, l2));
        Ok(Mmd2Estimate { value, n_x: self.points.rows(), n_y: y.rows(), lengthscale: self.lengthscale })
    }
}

/// Full `n x n` kernel matrix.
pub fn gram_matrix(x: &RealMatrix, l: Lengthscale) -> RealMatrix {
    let n = x.rows();
    let l2 = l.get() * l.get();
    let mut g = RealMatrix::zeros(n, n);
    for i in 0..n {
        g.row_mut(i)[i] = 1.0;
        for j in i + 1..n {
            let k = se_from_sq(sq_dist(x.row(i), x.row(j)), l2);
            g.row_mut(i)[j] = k;
            g.row_mut(j)[i] = k;
        }
    }
    g
}
