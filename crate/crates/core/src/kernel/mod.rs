//! Squared-exponential kernel, median-heuristic lengthscale and MMD estimators.

mod closed_form;
mod mmd;
mod se;
mod transfer;

pub use closed_form::mmd2_gaussian_closed_form;
pub use mmd::{gram_matrix, mmd2_unbiased, Mmd2Estimate, MmdReference};
pub use se::{median_heuristic, se_kernel, Lengthscale};
pub use transfer::TransferFunctionKernel;
