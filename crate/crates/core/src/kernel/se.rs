use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, sqrt};
use crate::matrix::RealMatrix;

/// Positive, finite kernel lengthscale `l`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Lengthscale(f64);

impl Lengthscale {
    pub fn new(l: f64) -> Result<Self> {
        if l.is_finite() && l > 0.0 {
            Ok(Self(l))
        } else {
            Err(Error::InvalidParameter(format!("lengthscale must be finite and > 0, got {l}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `exp(-d² / l²)` for a precomputed squared distance.
#[inline]
pub(crate) fn se_from_sq(d2: f64, l2: f64) -> f64 {
    exp(-d2 / l2)
}

/// `k(x, x') = exp(-‖x - x'‖² / l²)`.
pub fn se_kernel(x: &[f64], x2: &[f64], l: Lengthscale) -> Result<f64> {
    if x.len() != x2.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: x2.len() });
    }
    Ok(se_from_sq(sq_dist(x, x2), l.0 * l.0))
}

/// `l = sqrt(med / 2)`, `med` the median squared distance over distinct pairs.
///
/// For an even number of pairs the median is the mean of the two middle values.
pub fn median_heuristic(x: &RealMatrix) -> Result<Lengthscale> {
    let n = x.rows();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let mut d2: Vec<f64> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        let xi = x.row(i);
        for j in i + 1..n {
            d2.push(sq_dist(xi, x.row(j)));
        }
    }
    if d2.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("non-finite pairwise distance".into()));
    }
    let med = median_in_place(&mut d2);
    if med <= 0.0 {
        return Err(Error::DegenerateData("median pairwise squared distance is zero".into()));
    }
    Lengthscale::new(sqrt(med / 2.0))
}

pub(crate) fn median_in_place(v: &mut [f64]) -> f64 {
    let n = v.len();
    debug_assert!(n > 0);
    let mid = n / 2;
    let (lower, upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let below = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (below + upper)
    }
}
