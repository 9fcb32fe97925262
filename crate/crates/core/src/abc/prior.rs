use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::rng::rng_from_seed;

/// Independent uniform priors on a box in parameter space.
///
/// Integer-masked dimensions are sampled and adjusted as reals and only rounded
/// when handed to a simulator.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorBox {
    names: Vec<String>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    integer_mask: Vec<bool>,
}

impl PriorBox {
    pub fn new(names: Vec<String>, lower: Vec<f64>, upper: Vec<f64>, integer_mask: Vec<bool>) -> Result<Self> {
        let p = names.len();
        for len in [lower.len(), upper.len(), integer_mask.len()] {
            if len != p {
                return Err(Error::DimensionMismatch { expected: p, found: len });
            }
        }
        if p == 0 {
            return Err(Error::InvalidConfig("prior box has no parameters".into()));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidConfig(format!(
                    "prior bounds for `{}` must be finite with lower < upper, got [{lo}, {hi}]",
                    names[i]
                )));
            }
        }
        Ok(Self { names, lower, upper, integer_mask })
    }

    /// Build from `(name, lower, upper, integer)` tuples.
    pub fn from_bounds(bounds: &[(&str, f64, f64, bool)]) -> Result<Self> {
        Self::new(
            bounds.iter().map(|b| String::from(b.0)).collect(),
            bounds.iter().map(|b| b.1).collect(),
            bounds.iter().map(|b| b.2).collect(),
            bounds.iter().map(|b| b.3).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn integer_mask(&self) -> &[bool] {
        &self.integer_mask
    }

    pub fn width(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    /// Closed-box membership.
    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim()
            && theta.iter().zip(self.lower.iter().zip(&self.upper)).all(|(t, (lo, hi))| *lo <= *t && *t <= *hi)
    }

    /// Uniform density, zero outside the box.
    pub fn density(&self, theta: &[f64]) -> f64 {
        if self.contains(theta) {
            1.0 / self.lower.iter().zip(&self.upper).map(|(lo, hi)| hi - lo).product::<f64>()
        } else {
            0.0
        }
    }

    /// Round integer-masked coordinates for a simulator call.
    pub fn for_simulation(&self, theta: &[f64]) -> Vec<f64> {
        theta
            .iter()
            .zip(&self.integer_mask)
            .map(|(t, is_int)| if *is_int { libm::round(*t) } else { *t })
            .collect()
    }

    /// Replace one parameter's bounds, e.g. to centre a noise prior on a known level.
    pub fn with_bounds(mut self, name: &str, lower: f64, upper: f64) -> Result<Self> {
        let j = self
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidConfig(format!("no parameter named `{name}`")))?;
        self.lower[j] = lower;
        self.upper[j] = upper;
        Self::new(self.names, self.lower, self.upper, self.integer_mask)
    }
}

/// `m` iid draws from the prior, one row per draw.
pub fn sample_prior(prior: &PriorBox, m: usize, seed: u64) -> Result<RealMatrix> {
    if m == 0 {
        return Err(Error::InvalidConfig("need at least one prior draw".into()));
    }
    let mut rng = rng_from_seed(seed);
    let p = prior.dim();
    let mut data = Vec::with_capacity(m * p);
    for _ in 0..m {
        for j in 0..p {
            let u: f64 = rng.random();
            data.push(prior.lower[j] + u * prior.width(j));
        }
    }
    RealMatrix::new(m, p, data)
}
