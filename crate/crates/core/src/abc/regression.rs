use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::{Candidate, PriorBox, SummaryVector};
use crate::error::{Error, Result};
use crate::math::{exp, log, sqrt};
use crate::matrix::RealMatrix;

/// Logit maps are clamped this far inside the unit interval.
const LOGIT_CLAMP: f64 = 1e-9;
/// Design matrices with a smaller singular value ratio are treated as singular.
const RANK_TOL: f64 = 1e-10;
const MAD_SCALE: f64 = 1.4826;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegressionMode {
    /// Local-linear adjustment on the summaries.
    #[default]
    Linear,
    /// Return the accepted parameters unchanged (plain rejection).
    Disabled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionOutcome {
    pub adjusted: RealMatrix,
    /// Summary coordinates left out because their MAD over the accepted set is zero.
    pub dropped_coordinates: Vec<usize>,
    /// Why the slope was forced to zero, if it was.
    pub fallback: Option<String>,
}

fn to_logit(x: f64, lo: f64, hi: f64) -> f64 {
    let u = ((x - lo) / (hi - lo)).clamp(LOGIT_CLAMP, 1.0 - LOGIT_CLAMP);
    log(u / (1.0 - u))
}

fn from_logit(y: f64, lo: f64, hi: f64) -> f64 {
    let u = 1.0 / (1.0 + exp(-y));
    (lo + (hi - lo) * u).clamp(lo, hi)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Scaled median absolute deviation.
fn mad(col: &[f64]) -> f64 {
    let mut v = col.to_vec();
    let med = median(&mut v);
    let mut dev: Vec<f64> = col.iter().map(|x| (x - med).abs()).collect();
    MAD_SCALE * median(&mut dev)
}

/// Epanechnikov weight on MMD²; values at or below zero get full weight.
fn epanechnikov(delta: f64, delta_max: f64) -> f64 {
    if delta <= 0.0 || delta_max <= 0.0 {
        1.0
    } else {
        let r = delta / delta_max;
        (1.0 - r * r).max(0.0)
    }
}

fn unchanged(thetas: &RealMatrix, dropped: Vec<usize>, reason: String) -> RegressionOutcome {
    log::warn!("regression adjustment skipped: {reason}");
    RegressionOutcome { adjusted: thetas.clone(), dropped_coordinates: dropped, fallback: Some(reason) }
}

/// Regression adjustment on plain matrices: `thetas` and `summaries` have one
/// row per accepted candidate, `mmd2` its distance to the observations.
///
/// Summaries are scaled by their MAD, parameters mapped to logit space, and
/// each parameter is regressed on `s_i - s_obs` with Epanechnikov weights.
/// The fitted slope is then removed from every sample, which is mapped back
/// into the prior box.
pub fn regression_adjust_raw(
    thetas: &RealMatrix,
    summaries: &RealMatrix,
    mmd2: &[f64],
    s_obs: &[f64],
    prior: &PriorBox,
    mode: RegressionMode,
) -> Result<RegressionOutcome> {
    let n = thetas.rows();
    let p = thetas.cols();
    if p != prior.dim() {
        return Err(Error::DimensionMismatch { expected: prior.dim(), found: p });
    }
    if summaries.rows() != n || mmd2.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: summaries.rows().min(mmd2.len()) });
    }
    if summaries.cols() != s_obs.len() {
        return Err(Error::DimensionMismatch { expected: summaries.cols(), found: s_obs.len() });
    }
    if mode == RegressionMode::Disabled {
        return Ok(RegressionOutcome { adjusted: thetas.clone(), dropped_coordinates: Vec::new(), fallback: None });
    }

    let mut kept = Vec::new();
    let mut scale = Vec::new();
    let mut dropped = Vec::new();
    for j in 0..summaries.cols() {
        let m = mad(&summaries.column(j));
        if m > 0.0 && m.is_finite() {
            kept.push(j);
            scale.push(m);
        } else {
            log::warn!("summary coordinate {j} has zero MAD over the accepted set; dropped from the regression");
            dropped.push(j);
        }
    }
    if kept.is_empty() {
        return Ok(unchanged(thetas, dropped, "no summary coordinate varies over the accepted set".into()));
    }

    let delta_max = mmd2.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = mmd2.iter().map(|d| epanechnikov(*d, delta_max)).collect();
    let cols = kept.len() + 1;
    let positive = w.iter().filter(|x| **x > 0.0).count();
    if positive < cols {
        return Ok(unchanged(
            thetas,
            dropped,
            format!("{positive} positively weighted samples cannot fit {cols} coefficients"),
        ));
    }

    let offsets: Vec<Vec<f64>> = (0..n)
        .map(|i| kept.iter().zip(&scale).map(|(&j, s)| (summaries.get(i, j) - s_obs[j]) / s).collect())
        .collect();
    let logits: Vec<Vec<f64>> = thetas
        .iter_rows()
        .map(|row| (0..p).map(|k| to_logit(row[k], prior.lower()[k], prior.upper()[k])).collect())
        .collect();

    let design = DMatrix::from_fn(n, cols, |i, c| sqrt(w[i]) * if c == 0 { 1.0 } else { offsets[i][c - 1] });
    let target = DMatrix::from_fn(n, p, |i, k| sqrt(w[i]) * logits[i][k]);
    let svd = design.svd(true, true);
    let sv_max = svd.singular_values.max();
    let sv_min = svd.singular_values.min();
    if !(sv_max > 0.0 && sv_min > RANK_TOL * sv_max) {
        return Ok(unchanged(thetas, dropped, "singular regression design".into()));
    }
    let coef = svd.solve(&target, 0.0).map_err(|e| Error::NumericalDomain(String::from(e)))?;

    let mut data = Vec::with_capacity(n * p);
    for i in 0..n {
        for k in 0..p {
            let shift: f64 = offsets[i].iter().enumerate().map(|(c, d)| coef[(c + 1, k)] * d).sum();
            data.push(from_logit(logits[i][k] - shift, prior.lower()[k], prior.upper()[k]));
        }
    }
    Ok(RegressionOutcome { adjusted: RealMatrix::new(n, p, data)?, dropped_coordinates: dropped, fallback: None })
}

/// Adjust accepted candidates towards the observed summary.
pub fn regression_adjust(
    accepted: &[Candidate],
    s_obs: &SummaryVector,
    prior: &PriorBox,
    mode: RegressionMode,
) -> Result<RegressionOutcome> {
    if accepted.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let thetas = RealMatrix::from_rows(accepted.iter().map(|c| &c.theta))?;
    let summaries = RealMatrix::from_rows(accepted.iter().map(|c| &c.summary.values))?;
    let mmd2: Vec<f64> = accepted.iter().map(|c| c.mmd2).collect();
    regression_adjust_raw(&thetas, &summaries, &mmd2, &s_obs.values, prior, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng;

    fn prior() -> PriorBox {
        PriorBox::from_bounds(&[("a", 0.0, 1.0, false), ("b", -5.0, 5.0, false)]).unwrap()
    }

    fn random_setup(seed: u64, n: usize, d: usize) -> (RealMatrix, RealMatrix, Vec<f64>) {
        let mut rng = rng_from_seed(seed);
        let p = prior();
        let thetas = RealMatrix::from_rows(
            (0..n).map(|_| (0..2).map(|k| p.lower()[k] + rng.random::<f64>() * p.width(k)).collect::<Vec<_>>()),
        )
        .unwrap();
        let summaries =
            RealMatrix::from_rows((0..n).map(|_| (0..d).map(|_| rng.random::<f64>()).collect::<Vec<_>>())).unwrap();
        let mmd2 = (0..n).map(|_| rng.random::<f64>() * 0.1).collect();
        (thetas, summaries, mmd2)
    }

    #[test]
    fn disabled_returns_accepted() {
        let (t, s, d) = random_setup(1, 30, 3);
        let out = regression_adjust_raw(&t, &s, &d, &[0.5, 0.5, 0.5], &prior(), RegressionMode::Disabled).unwrap();
        assert_eq!(out.adjusted, t);
    }

    #[test]
    fn equal_summaries_leave_samples_unchanged() {
        let (t, _, d) = random_setup(2, 20, 3);
        let s = RealMatrix::from_rows((0..20).map(|_| [0.1, 0.2, 0.3])).unwrap();
        let out = regression_adjust_raw(&t, &s, &d, &[0.1, 0.2, 0.3], &prior(), RegressionMode::Linear).unwrap();
        assert_eq!(out.adjusted, t);
        assert_eq!(out.dropped_coordinates, [0, 1, 2]);
    }

    #[test]
    fn too_few_weighted_rows_fall_back() {
        let (t, s, d) = random_setup(3, 4, 5);
        let out = regression_adjust_raw(&t, &s, &d, &[0.5; 5], &prior(), RegressionMode::Linear).unwrap();
        assert_eq!(out.adjusted, t);
        assert!(out.fallback.is_some());
    }

    #[test]
    fn collinear_design_falls_back() {
        let (t, s, d) = random_setup(4, 30, 1);
        let twin = RealMatrix::from_rows(s.iter_rows().map(|r| [r[0], 2.0 * r[0]])).unwrap();
        let out = regression_adjust_raw(&t, &twin, &d, &[0.5, 1.0], &prior(), RegressionMode::Linear).unwrap();
        assert_eq!(out.adjusted, t);
        assert!(out.fallback.unwrap().contains("singular"));
    }

    #[test]
    fn exact_linear_relation_is_recovered() {
        // logit(θ_i) = a + B s_i exactly, all weights equal
        let p = prior();
        let mut rng = rng_from_seed(5);
        let a = [0.3, -0.2];
        let b = [[0.8, -0.5, 0.1], [0.2, 0.4, -0.9]];
        let n = 40;
        let s: Vec<[f64; 3]> = (0..n).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
        let thetas = RealMatrix::from_rows(s.iter().map(|si| {
            (0..2)
                .map(|k| {
                    let y = a[k] + (0..3).map(|j| b[k][j] * si[j]).sum::<f64>();
                    from_logit(y, p.lower()[k], p.upper()[k])
                })
                .collect::<Vec<_>>()
        }))
        .unwrap();
        let summaries = RealMatrix::from_rows(s.iter()).unwrap();
        let s_obs = [0.4, 0.6, 0.5];
        let out =
            regression_adjust_raw(&thetas, &summaries, &alloc::vec![0.0; n], &s_obs, &p, RegressionMode::Linear)
                .unwrap();
        assert!(out.fallback.is_none());
        for row in out.adjusted.iter_rows() {
            for k in 0..2 {
                let expected = a[k] + (0..3).map(|j| b[k][j] * s_obs[j]).sum::<f64>();
                let got = to_logit(row[k], p.lower()[k], p.upper()[k]);
                assert!((got - expected).abs() < 1e-8, "{got} vs {expected}");
            }
        }
    }

    #[test]
    fn epanechnikov_shape() {
        assert_eq!(epanechnikov(-0.1, 1.0), 1.0);
        assert_eq!(epanechnikov(0.5, 1.0), 0.75);
        assert_eq!(epanechnikov(1.0, 1.0), 0.0);
        assert_eq!(epanechnikov(0.3, -0.1), 1.0);
    }

    proptest! {
        #[test]
        fn adjusted_samples_stay_in_box(seed in 0u64..1000, obs in proptest::collection::vec(-3.0f64..3.0, 3)) {
            let (t, s, d) = random_setup(seed, 25, 3);
            let out = regression_adjust_raw(&t, &s, &d, &obs, &prior(), RegressionMode::Linear).unwrap();
            prop_assert!(out.adjusted.iter_rows().all(|r| prior().contains(r)));
        }

        #[test]
        fn logit_round_trip(x in 0.001f64..0.999) {
            let back = from_logit(to_logit(x, 0.0, 1.0), 0.0, 1.0);
            prop_assert!((back - x).abs() < 1e-12);
        }
    }
}
