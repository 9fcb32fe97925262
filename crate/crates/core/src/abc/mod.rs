//! Likelihood-free calibration: rejection on MMD², regression adjustment and
//! population Monte Carlo over a uniform prior box.

mod engine;
mod kde;
mod pmc;
mod prior;
mod regression;
mod rejection;
mod summary;

pub use engine::{run_pmc_abc, run_pmc_abc_with_observer, PmcConfig, PmcFailure, PmcRun};
pub use kde::kde_mode;
pub use pmc::{
    equal_weights, pmc_propose, pmc_weights, posterior_mean, posterior_std, proposal_variances, WeightedPopulation,
};
pub use prior::{sample_prior, PriorBox};
pub use regression::{regression_adjust, regression_adjust_raw, RegressionMode, RegressionOutcome};
pub use rejection::{rejection_select, Candidate};
pub use summary::{detect_misspecification, summarize, summary_len, Misspecification, SummaryVector};
