use alloc::vec::Vec;

use super::SummaryVector;
use crate::error::{Error, Result};
use crate::signal::LogMomentMatrix;

/// One simulated parameter with its data summaries and distance to the observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// Position in the iteration's draw order; breaks ties in MMD².
    pub index: usize,
    pub theta: Vec<f64>,
    pub log_moments: LogMomentMatrix,
    pub summary: SummaryVector,
    pub mmd2: f64,
}

/// Keep the `m_eps` candidates with the smallest MMD², ordered by `(mmd2, index)`.
pub fn rejection_select(mut candidates: Vec<Candidate>, m_eps: usize) -> Result<Vec<Candidate>> {
    if m_eps == 0 || m_eps > candidates.len() {
        return Err(Error::InvalidConfig(alloc::format!(
            "cannot accept {m_eps} of {} candidates",
            candidates.len()
        )));
    }
    candidates.sort_by(|a, b| a.mmd2.total_cmp(&b.mmd2).then(a.index.cmp(&b.index)));
    candidates.truncate(m_eps);
    Ok(candidates)
}
