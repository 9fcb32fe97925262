//! Run configuration files.
//!
//! ```toml
//! model = "sv"
//! m = 2000
//! m_eps = 100
//! t_iterations = 10
//! n_sim = 100
//! i_moments = 4
//! seed = 1
//!
//! [prior]
//! sigma_w2 = [2e-11, 2e-10]
//! ```
//!
//! Unset fields take their defaults; `[prior]` overrides individual bounds of
//! the model's default prior; `[grid]` and `[geometry]` are optional.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use chancal_core::abc::{PmcConfig, PriorBox, RegressionMode};
use chancal_core::models::{ChannelModel, PropagationGraph, RoomGeometry, SalehValenzuela};
use chancal_core::signal::{FrequencyGrid, TransferFunctionDataset};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::geometry::GeometrySpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Saleh-Valenzuela clustered model.
    Sv,
    /// Propagation-graph model.
    Pg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regression {
    #[default]
    Linear,
    Disabled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_s: usize,
    pub bandwidth_hz: f64,
    pub f_start_hz: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        let g = FrequencyGrid::mmwave_default();
        Self { n_s: g.n_s(), bandwidth_hz: g.bandwidth_hz(), f_start_hz: g.f_start_hz() }
    }
}

impl GridSpec {
    pub fn grid(&self) -> CliResult<FrequencyGrid> {
        Ok(FrequencyGrid::with_start(self.n_s, self.bandwidth_hz, self.f_start_hz)?)
    }
}

fn default_m() -> usize {
    2000
}
fn default_m_eps() -> usize {
    100
}
fn default_t() -> usize {
    10
}
fn default_i() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_m_eps")]
    pub m_eps: usize,
    #[serde(default = "default_t")]
    pub t_iterations: usize,
    /// Defaults to 100 for S-V and to one model call (|Tx|·|Rx| rows) for PG.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sim: Option<usize>,
    #[serde(default = "default_i")]
    pub i_moments: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub regression: Regression,
    #[serde(default)]
    pub direct_edges: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub prior: BTreeMap<String, [f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySpec>,
}

impl RunConfig {
    pub fn new(model: ModelKind) -> Self {
        Self {
            model,
            m: default_m(),
            m_eps: default_m_eps(),
            t_iterations: default_t(),
            n_sim: None,
            i_moments: default_i(),
            seed: 0,
            regression: Regression::Linear,
            direct_edges: false,
            grid: None,
            prior: BTreeMap::new(),
            geometry: None,
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Invalid(msg) => CliError::Invalid(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Invalid(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn grid(&self) -> CliResult<FrequencyGrid> {
        self.grid.unwrap_or_default().grid()
    }

    /// Geometry from the config, else the default conference room with 5×5 arrays.
    pub fn geometry(&self) -> CliResult<RoomGeometry> {
        match &self.geometry {
            Some(spec) => spec.resolve(),
            None => Ok(RoomGeometry::conference_room(5)?),
        }
    }

    pub fn build_model(&self) -> CliResult<AnyModel> {
        Ok(match self.model {
            ModelKind::Sv => AnyModel::Sv(SalehValenzuela::default()),
            ModelKind::Pg => {
                let mut pg = PropagationGraph::new(self.geometry()?);
                pg.direct_edges = self.direct_edges;
                AnyModel::Pg(pg)
            }
        })
    }

    /// The model's default prior with the `[prior]` overrides applied.
    pub fn prior(&self, model: &AnyModel) -> CliResult<PriorBox> {
        let mut prior = model.default_prior();
        for (name, [lo, hi]) in &self.prior {
            prior = prior.with_bounds(name, *lo, *hi)?;
        }
        Ok(prior)
    }

    pub fn n_sim(&self, model: &AnyModel) -> usize {
        self.n_sim.unwrap_or(match model {
            AnyModel::Sv(_) => 100,
            AnyModel::Pg(pg) => pg.geometry.n_pairs(),
        })
    }

    pub fn pmc_config(&self, model: &AnyModel) -> PmcConfig {
        PmcConfig {
            m: self.m,
            m_eps: self.m_eps,
            t_iterations: self.t_iterations,
            n_sim: self.n_sim(model),
            i_moments: self.i_moments,
            seed: self.seed,
            regression: match self.regression {
                Regression::Linear => RegressionMode::Linear,
                Regression::Disabled => RegressionMode::Disabled,
            },
        }
    }

    /// A copy with every default made explicit, suitable for re-running.
    pub fn resolved(&self, model: &AnyModel, grid: &FrequencyGrid) -> CliResult<Self> {
        let prior = self.prior(model)?;
        let mut out = self.clone();
        out.n_sim = Some(self.n_sim(model));
        out.grid = Some(GridSpec { n_s: grid.n_s(), bandwidth_hz: grid.bandwidth_hz(), f_start_hz: grid.f_start_hz() });
        out.prior = prior
            .names()
            .iter()
            .enumerate()
            .map(|(j, n)| (n.clone(), [prior.lower()[j], prior.upper()[j]]))
            .collect();
        if let AnyModel::Pg(pg) = model {
            out.geometry = Some(GeometrySpec::from_geometry(&pg.geometry));
        }
        Ok(out)
    }
}

/// Either simulator behind one [`ChannelModel`] implementation.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    Sv(SalehValenzuela),
    Pg(PropagationGraph),
}

impl ChannelModel for AnyModel {
    fn name(&self) -> &'static str {
        match self {
            AnyModel::Sv(m) => m.name(),
            AnyModel::Pg(m) => m.name(),
        }
    }

    fn parameter_names(&self) -> &'static [&'static str] {
        match self {
            AnyModel::Sv(m) => m.parameter_names(),
            AnyModel::Pg(m) => m.parameter_names(),
        }
    }

    fn default_prior(&self) -> PriorBox {
        match self {
            AnyModel::Sv(m) => m.default_prior(),
            AnyModel::Pg(m) => m.default_prior(),
        }
    }

    fn simulate(
        &self,
        theta: &[f64],
        n_realizations: usize,
        grid: &FrequencyGrid,
        seed: u64,
    ) -> chancal_core::Result<TransferFunctionDataset> {
        match self {
            AnyModel::Sv(m) => m.simulate(theta, n_realizations, grid, seed),
            AnyModel::Pg(m) => m.simulate(theta, n_realizations, grid, seed),
        }
    }
}
