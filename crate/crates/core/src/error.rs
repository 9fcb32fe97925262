use alloc::string::String;

/// Crate-wide result alias.
pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the signal, kernel, model and ABC layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("degenerate signal in realization {row}: temporal moment {moment} is {value}")]
    DegenerateSignal { row: usize, moment: usize, value: f64 },
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("numerical domain error: {0}")]
    NumericalDomain(String),
    #[error("expected path count {expected_paths:.3e} exceeds the cap {cap:.3e}")]
    ResourceGuard { expected_paths: f64, cap: f64 },
    #[error("propagation graph diverges: reflection gain g = {g} gives spectral radius bound {bound} >= 1")]
    DivergentGraph { g: f64, bound: f64 },
    #[error("all importance weights are numerically zero")]
    DegenerateWeights,
    #[error("proposal stuck: {accepted} of {attempts} perturbed draws fell inside the prior box")]
    StuckProposal { accepted: usize, attempts: usize },
}

/// Coarse error classes, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input, shape, parameter or configuration.
    Validation,
    /// Degenerate data or a numerical failure inside an algorithm.
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidData(_)
            | Error::InvalidParameter(_)
            | Error::InvalidConfig(_)
            | Error::DimensionMismatch { .. }
            | Error::TooFewPoints { .. }
            | Error::ResourceGuard { .. } => ErrorKind::Validation,
            Error::DegenerateSignal { .. }
            | Error::DegenerateData(_)
            | Error::NumericalDomain(_)
            | Error::DivergentGraph { .. }
            | Error::DegenerateWeights
            | Error::StuckProposal { .. } => ErrorKind::Numerical,
        }
    }
}
