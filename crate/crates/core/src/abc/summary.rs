use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::signal::LogMomentMatrix;

/// `I` column means of `z` followed by its `I(I+1)/2` upper-triangular covariances.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryVector {
    pub values: Vec<f64>,
}

/// `(I² + 3I) / 2`.
pub const fn summary_len(i_moments: usize) -> usize {
    (i_moments * i_moments + 3 * i_moments) / 2
}

/// Sample means and unbiased sample covariances of the log moments.
pub fn summarize(z: &LogMomentMatrix) -> Result<SummaryVector> {
    let n = z.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let m = z.matrix();
    let i_m = z.i_moments();
    let means = m.column_means();
    let mut values = Vec::with_capacity(summary_len(i_m));
    values.extend_from_slice(&means);
    let mut cov = alloc::vec![0.0; i_m * i_m];
    for row in m.iter_rows() {
        for a in 0..i_m {
            let da = row[a] - means[a];
            for b in a..i_m {
                cov[a * i_m + b] += da * (row[b] - means[b]);
            }
        }
    }
    for a in 0..i_m {
        for b in a..i_m {
            values.push(cov[a * i_m + b] / (n - 1) as f64);
        }
    }
    Ok(SummaryVector { values })
}

/// Result of comparing the observed summary with the first-iteration summaries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Misspecification {
    pub flagged: bool,
    /// Summary coordinates where the observed value lies outside the simulated range.
    pub outside: Vec<usize>,
}

/// Flag the model as misspecified when any observed summary coordinate lies
/// outside `[min, max]` of that coordinate over the simulated summaries.
pub fn detect_misspecification(all: &[SummaryVector], s_obs: &SummaryVector) -> Result<Misspecification> {
    if all.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: all.len() });
    }
    let d = s_obs.values.len();
    if let Some(bad) = all.iter().find(|s| s.values.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.values.len() });
    }
    let outside: Vec<usize> = (0..d)
        .filter(|&j| {
            let (lo, hi) = all
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.values[j]), hi.max(s.values[j])));
            !(lo <= s_obs.values[j] && s_obs.values[j] <= hi)
        })
        .collect();
    Ok(Misspecification { flagged: !outside.is_empty(), outside })
}
