use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use super::{
    detect_misspecification, equal_weights, kde_mode, pmc_propose, pmc_weights, proposal_variances, regression_adjust,
    rejection_select, sample_prior, summarize, Candidate, Misspecification, PriorBox, RegressionMode, SummaryVector,
    WeightedPopulation,
};
use crate::error::{Error, Result};
use crate::kernel::{median_heuristic, Lengthscale, MmdReference};
use crate::matrix::RealMatrix;
use crate::models::ChannelModel;
use crate::rng::{derive_seed, stream};
use crate::signal::{log_moment_matrix, TransferFunctionDataset};

/// Sizes and seed of a PMC-ABC run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmcConfig {
    /// Candidates simulated per iteration.
    pub m: usize,
    /// Candidates accepted per iteration.
    pub m_eps: usize,
    pub t_iterations: usize,
    /// Realizations simulated per candidate.
    pub n_sim: usize,
    /// Temporal moments per realization.
    pub i_moments: usize,
    pub seed: u64,
    pub regression: RegressionMode,
}

impl Default for PmcConfig {
    fn default() -> Self {
        Self { m: 2000, m_eps: 100, t_iterations: 10, n_sim: 100, i_moments: 4, seed: 0, regression: RegressionMode::Linear }
    }
}

impl PmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m_eps == 0 || self.m_eps > self.m {
            return Err(Error::InvalidConfig(format!("need 1 <= m_eps <= m, got m_eps = {}, m = {}", self.m_eps, self.m)));
        }
        if self.t_iterations == 0 {
            return Err(Error::InvalidConfig("need at least one iteration".into()));
        }
        if self.n_sim < 2 {
            return Err(Error::InvalidConfig(format!("n_sim must be >= 2, got {}", self.n_sim)));
        }
        if self.i_moments == 0 {
            return Err(Error::InvalidConfig("i_moments must be >= 1".into()));
        }
        Ok(())
    }
}

/// Everything a finished (or partially finished) run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct PmcRun {
    pub populations: Vec<WeightedPopulation>,
    /// Kernel lengthscale fixed from the observed log moments.
    pub lengthscale: Option<Lengthscale>,
    pub misspecification: Misspecification,
    /// Summary of the observed data; the regression target unless misspecified.
    pub s_obs: Option<SummaryVector>,
}

/// A run that stopped early, with the populations completed before the error.
#[derive(Debug, Clone, PartialEq)]
pub struct PmcFailure {
    /// 1-based iteration that failed; 0 for set-up errors.
    pub iteration: usize,
    pub error: Error,
    pub partial: PmcRun,
}

impl fmt::Display for PmcFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.iteration == 0 {
            write!(f, "calibration set-up failed: {}", self.error)
        } else {
            write!(f, "calibration failed in iteration {}: {}", self.iteration, self.error)
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PmcFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Run PMC-ABC and return every iteration's population.
pub fn run_pmc_abc<M: ChannelModel + ?Sized>(
    model: &M,
    observed: &TransferFunctionDataset,
    prior: &PriorBox,
    config: &PmcConfig,
) -> core::result::Result<PmcRun, PmcFailure> {
    run_pmc_abc_with_observer(model, observed, prior, config, |_| {})
}

/// As [`run_pmc_abc`], calling `observer` after each completed iteration.
pub fn run_pmc_abc_with_observer<M, F>(
    model: &M,
    observed: &TransferFunctionDataset,
    prior: &PriorBox,
    config: &PmcConfig,
    mut observer: F,
) -> core::result::Result<PmcRun, PmcFailure>
where
    M: ChannelModel + ?Sized,
    F: FnMut(&WeightedPopulation),
{
    let mut run = PmcRun {
        populations: Vec::new(),
        lengthscale: None,
        misspecification: Misspecification::default(),
        s_obs: None,
    };
    let fail = |iteration, error, partial| PmcFailure { iteration, error, partial };

    let setup = || -> Result<(RealMatrix, Option<Lengthscale>, SummaryVector)> {
        config.validate()?;
        if prior.dim() != model.parameter_names().len() {
            return Err(Error::DimensionMismatch { expected: model.parameter_names().len(), found: prior.dim() });
        }
        let z_obs = log_moment_matrix(observed, config.i_moments)?;
        let s_obs = summarize(&z_obs)?;
        let z_obs = z_obs.into_matrix();
        let lengthscale = match median_heuristic(&z_obs) {
            Ok(l) => Some(l),
            Err(Error::DegenerateData(_)) => None,
            Err(e) => return Err(e),
        };
        Ok((z_obs, lengthscale, s_obs))
    };
    let (z_obs, lengthscale, s_obs) = match setup() {
        Ok(v) => v,
        Err(e) => return Err(fail(0, e, run)),
    };
    run.s_obs = Some(s_obs.clone());
    let mut reference = match lengthscale {
        Some(l) => match MmdReference::new(z_obs.clone(), l) {
            Ok(r) => Some(r),
            Err(e) => return Err(fail(0, e, run)),
        },
        None => None,
    };
    run.lengthscale = reference.as_ref().map(|r| r.lengthscale());

    for t in 1..=config.t_iterations {
        match iteration(model, observed, prior, config, &z_obs, &mut reference, &s_obs, t, &mut run) {
            Ok(pop) => {
                observer(&pop);
                run.populations.push(pop);
            }
            Err(e) => return Err(fail(t, e, run)),
        }
    }
    Ok(run)
}

fn simulate_candidate<M: ChannelModel + ?Sized>(
    model: &M,
    observed: &TransferFunctionDataset,
    prior: &PriorBox,
    config: &PmcConfig,
    t: usize,
    index: usize,
    theta: &[f64],
) -> Result<Candidate> {
    let seed = derive_seed(config.seed, t as u64, index as u64);
    let ds = model.simulate(&prior.for_simulation(theta), config.n_sim, observed.grid(), seed)?;
    let z = log_moment_matrix(&ds, config.i_moments)?;
    let summary = summarize(&z)?;
    Ok(Candidate { index, theta: theta.to_vec(), log_moments: z, summary, mmd2: f64::NAN })
}

#[cfg(feature = "parallel")]
fn for_each_index<T: Send, F: Fn(usize) -> Result<T> + Sync + Send>(n: usize, f: F) -> Result<Vec<T>> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn for_each_index<T, F: Fn(usize) -> Result<T>>(n: usize, f: F) -> Result<Vec<T>> {
    (0..n).map(f).collect()
}

/// Median-heuristic lengthscale over one simulated realization per candidate,
/// used when the observed log moments have no spread.
fn fallback_lengthscale(candidates: &[Candidate]) -> Result<Lengthscale> {
    let pooled = RealMatrix::from_rows(candidates.iter().map(|c| c.log_moments.matrix().row(0)))?;
    let l = median_heuristic(&pooled)?;
    log::warn!(
        "observed log moments have zero median pairwise distance; lengthscale {:.6e} taken from first-iteration simulations",
        l.get()
    );
    Ok(l)
}

#[allow(clippy::too_many_arguments)]
fn iteration<M: ChannelModel + ?Sized>(
    model: &M,
    observed: &TransferFunctionDataset,
    prior: &PriorBox,
    config: &PmcConfig,
    z_obs: &RealMatrix,
    reference: &mut Option<MmdReference>,
    s_obs: &SummaryVector,
    t: usize,
    run: &mut PmcRun,
) -> Result<WeightedPopulation> {
    let prev = run.populations.last();
    let thetas = match prev {
        None => sample_prior(prior, config.m, derive_seed(config.seed, stream::PRIOR, 0))?,
        Some(p) => pmc_propose(p, config.m, prior, derive_seed(config.seed, stream::PROPOSAL, t as u64))?,
    };
    let mut candidates =
        for_each_index(thetas.rows(), |i| simulate_candidate(model, observed, prior, config, t, i, thetas.row(i)))?;
    if reference.is_none() {
        let r = MmdReference::new(z_obs.clone(), fallback_lengthscale(&candidates)?)?;
        run.lengthscale = Some(r.lengthscale());
        *reference = Some(r);
    }
    let reference = reference.as_ref().expect("reference set above");
    let mmd2 = for_each_index(candidates.len(), |i| Ok(reference.mmd2(candidates[i].log_moments.matrix())?.value))?;
    for (c, d) in candidates.iter_mut().zip(mmd2) {
        c.mmd2 = d;
    }

    if t == 1 {
        let summaries: Vec<SummaryVector> = candidates.iter().map(|c| c.summary.clone()).collect();
        run.misspecification = detect_misspecification(&summaries, s_obs)?;
        if run.misspecification.flagged {
            log::warn!(
                "model deemed misspecified: observed summary coordinates {:?} lie outside the simulated range",
                run.misspecification.outside
            );
        }
    }

    let accepted = rejection_select(candidates, config.m_eps)?;
    let thetas_accepted = RealMatrix::from_rows(accepted.iter().map(|c| &c.theta))?;

    let target = if run.misspecification.flagged {
        let mode = kde_mode(&thetas_accepted)?;
        let seed = derive_seed(config.seed, stream::PSEUDO_OBS, t as u64);
        let ds = model.simulate(&prior.for_simulation(&mode), observed.n_obs(), observed.grid(), seed)?;
        summarize(&log_moment_matrix(&ds, config.i_moments)?)?
    } else {
        s_obs.clone()
    };
    let outcome = regression_adjust(&accepted, &target, prior, config.regression)?;

    let weights = match prev {
        None => equal_weights(accepted.len()),
        Some(p) => pmc_weights(&thetas_accepted, p, prior)?,
    };
    let sigma_diag = proposal_variances(&outcome.adjusted, prior);
    let mmd2 = accepted.iter().map(|c| c.mmd2).collect();
    log::info!("iteration {t}: accepted {} of {}, proposal variances {:?}", accepted.len(), config.m, sigma_diag);
    Ok(WeightedPopulation {
        iteration: t,
        thetas_accepted,
        thetas_adjusted: outcome.adjusted,
        weights,
        sigma_diag,
        mmd2,
        misspecified: run.misspecification.flagged,
    })
}
