//! Forward simulators producing transfer-function datasets from parameter vectors.

mod noise;
mod pg;
mod sv;

pub use noise::add_noise;
pub use pg::{
    combine_calls, simulate_pg, PropagationGraph, PropagationGraphParams, RoomGeometry, PG_PARAMETER_NAMES,
    SPEED_OF_LIGHT,
};
pub use sv::{
    draw_realization, ray_gain, simulate_sv, SalehValenzuela, SalehValenzuelaParams, SvRealization,
    SV_PARAMETER_NAMES,
};

use crate::abc::PriorBox;
use crate::error::Result;
use crate::signal::{FrequencyGrid, TransferFunctionDataset};

/// Uniform simulator contract used by the calibration engine.
///
/// Identical `(theta, n_realizations, grid, seed)` must give bit-identical output.
pub trait ChannelModel: Sync {
    /// Short identifier, e.g. `"sv"`.
    fn name(&self) -> &'static str;

    fn parameter_names(&self) -> &'static [&'static str];

    /// Uniform prior box used when the caller does not supply one.
    fn default_prior(&self) -> PriorBox;

    fn simulate(
        &self,
        theta: &[f64],
        n_realizations: usize,
        grid: &FrequencyGrid,
        seed: u64,
    ) -> Result<TransferFunctionDataset>;
}
