use alloc::vec::Vec;

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::PriorBox;
use crate::error::{Error, Result};
use crate::math::{exp, log, sqrt};
use crate::matrix::RealMatrix;
use crate::rng::rng_from_seed;

/// Box rejection gives up after this many consecutive misses.
const MAX_ATTEMPTS_PER_DRAW: usize = 10_000;
/// Proposal standard deviations never drop below this fraction of the prior width.
const SIGMA_FLOOR: f64 = 1e-9;

/// Accepted particles of one iteration with their importance weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPopulation {
    /// 1-based.
    pub iteration: usize,
    /// Parameters as drawn, before regression adjustment.
    pub thetas_accepted: RealMatrix,
    pub thetas_adjusted: RealMatrix,
    pub weights: Vec<f64>,
    /// Per-dimension variance of the next proposal kernel.
    pub sigma_diag: Vec<f64>,
    pub mmd2: Vec<f64>,
    pub misspecified: bool,
}

pub fn equal_weights(n: usize) -> Vec<f64> {
    alloc::vec![1.0 / n as f64; n]
}

/// Twice the sample variance of each column, floored at `(1e-9 · width)²`.
pub fn proposal_variances(adjusted: &RealMatrix, prior: &PriorBox) -> Vec<f64> {
    let var = if adjusted.rows() >= 2 { adjusted.column_variances() } else { alloc::vec![0.0; adjusted.cols()] };
    var.iter()
        .enumerate()
        .map(|(j, v)| {
            let floor = SIGMA_FLOOR * prior.width(j);
            (2.0 * v).max(floor * floor)
        })
        .collect()
}

/// Draw `m` parameters: pick an adjusted particle by weight, add Gaussian
/// noise with variances `sigma_diag`, and redraw the noise until the whole
/// vector lies in the prior box.
pub fn pmc_propose(prev: &WeightedPopulation, m: usize, prior: &PriorBox, seed: u64) -> Result<RealMatrix> {
    let p = prior.dim();
    if prev.thetas_adjusted.cols() != p || prev.sigma_diag.len() != p {
        return Err(Error::DimensionMismatch { expected: p, found: prev.thetas_adjusted.cols() });
    }
    let pick = WeightedIndex::new(&prev.weights).map_err(|_| Error::DegenerateWeights)?;
    let sd: Vec<f64> = prev.sigma_diag.iter().map(|v| sqrt(*v)).collect();
    let mut rng = rng_from_seed(seed);
    let mut data = Vec::with_capacity(m * p);
    let mut candidate = alloc::vec![0.0; p];
    let mut attempts = 0usize;
    for drawn in 0..m {
        let centre = prev.thetas_adjusted.row(pick.sample(&mut rng));
        let mut misses = 0usize;
        loop {
            attempts += 1;
            for j in 0..p {
                let e: f64 = rng.sample(StandardNormal);
                candidate[j] = centre[j] + sd[j] * e;
            }
            if prior.contains(&candidate) {
                break;
            }
            misses += 1;
            if misses >= MAX_ATTEMPTS_PER_DRAW {
                return Err(Error::StuckProposal { accepted: drawn, attempts });
            }
        }
        data.extend_from_slice(&candidate);
    }
    RealMatrix::new(m, p, data)
}

/// Importance weights `p(θ_j) / Σ_i w_i φ(θ_j; θ̃_i, Σ)`, normalized to sum to one.
///
/// `φ` is the unnormalized Gaussian kernel restricted to the box; sums run in
/// log space so tiny kernels do not underflow.
pub fn pmc_weights(current: &RealMatrix, prev: &WeightedPopulation, prior: &PriorBox) -> Result<Vec<f64>> {
    let p = prior.dim();
    if current.cols() != p {
        return Err(Error::DimensionMismatch { expected: p, found: current.cols() });
    }
    let inv_var: Vec<f64> = prev.sigma_diag.iter().map(|v| 1.0 / v).collect();
    let log_prev_w: Vec<f64> = prev.weights.iter().map(|w| log(*w)).collect();
    let mut terms = Vec::with_capacity(prev.weights.len());
    let log_w: Vec<f64> = current
        .iter_rows()
        .map(|theta| {
            if !prior.contains(theta) {
                return f64::NEG_INFINITY;
            }
            terms.clear();
            for (centre, lw) in prev.thetas_adjusted.iter_rows().zip(&log_prev_w) {
                let q: f64 = theta.iter().zip(centre).zip(&inv_var).map(|((a, b), iv)| (a - b) * (a - b) * iv).sum();
                terms.push(lw - 0.5 * q);
            }
            // log of the uniform density is a constant and cancels on normalization
            -log_sum_exp(&terms)
        })
        .collect();
    normalize_log_weights(&log_w)
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + log(v.iter().map(|x| exp(x - max)).sum::<f64>())
}

fn normalize_log_weights(log_w: &[f64]) -> Result<Vec<f64>> {
    let finite_max = log_w.iter().cloned().filter(|x| x.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    if finite_max == f64::NEG_INFINITY {
        return Err(Error::DegenerateWeights);
    }
    // a zero kernel sum gives +inf; those points get all the mass between them
    let n_inf = log_w.iter().filter(|x| **x == f64::INFINITY).count();
    let w: Vec<f64> = if n_inf > 0 {
        log_w.iter().map(|x| if *x == f64::INFINITY { 1.0 } else { 0.0 }).collect()
    } else {
        log_w.iter().map(|x| exp(x - finite_max)).collect()
    };
    let total: f64 = w.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::DegenerateWeights);
    }
    Ok(w.iter().map(|x| x / total).collect())
}

/// Plain average of the adjusted samples.
pub fn posterior_mean(pop: &WeightedPopulation) -> Vec<f64> {
    pop.thetas_adjusted.column_means()
}

/// Sample standard deviation of the adjusted samples.
pub fn posterior_std(pop: &WeightedPopulation) -> Vec<f64> {
    if pop.thetas_adjusted.rows() < 2 {
        return alloc::vec![0.0; pop.thetas_adjusted.cols()];
    }
    pop.thetas_adjusted.column_variances().iter().map(|v| sqrt(*v)).collect()
}
