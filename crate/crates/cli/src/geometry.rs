//! Room geometry files.
//!
//! ```toml
//! dimensions_m = [3.0, 4.0, 3.0]
//! tx_positions_m = [[0.6, 0.8, 1.2]]
//! rx_positions_m = [[2.3, 3.1, 1.2], [2.3, 3.2, 1.2]]
//! ```
//!
//! Instead of explicit positions, `[tx_array]` / `[rx_array]` tables with
//! `centre_m`, `n` and `spacing_m` describe horizontal `n × n` planar arrays.

use std::fs;
use std::path::Path;

use chancal_core::models::RoomGeometry;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanarArray {
    pub centre_m: [f64; 3],
    pub n: usize,
    pub spacing_m: f64,
}

impl PlanarArray {
    pub fn positions(&self) -> Vec<[f64; 3]> {
        let offset = 0.5 * (self.n as f64 - 1.0) * self.spacing_m;
        let mut out = Vec::with_capacity(self.n * self.n);
        for ix in 0..self.n {
            for iy in 0..self.n {
                out.push([
                    self.centre_m[0] - offset + ix as f64 * self.spacing_m,
                    self.centre_m[1] - offset + iy as f64 * self.spacing_m,
                    self.centre_m[2],
                ]);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub dimensions_m: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_positions_m: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rx_positions_m: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_array: Option<PlanarArray>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rx_array: Option<PlanarArray>,
}

fn pick(explicit: &Option<Vec<[f64; 3]>>, array: &Option<PlanarArray>, side: &str) -> CliResult<Vec<[f64; 3]>> {
    match (explicit, array) {
        (Some(p), None) => Ok(p.clone()),
        (None, Some(a)) => Ok(a.positions()),
        (Some(_), Some(_)) => Err(CliError::Invalid(format!("give either {side}_positions_m or [{side}_array], not both"))),
        (None, None) => Err(CliError::Invalid(format!("geometry lacks {side}_positions_m or [{side}_array]"))),
    }
}

impl GeometrySpec {
    pub fn resolve(&self) -> CliResult<RoomGeometry> {
        let tx = pick(&self.tx_positions_m, &self.tx_array, "tx")?;
        let rx = pick(&self.rx_positions_m, &self.rx_array, "rx")?;
        Ok(RoomGeometry::new(self.dimensions_m, tx, rx)?)
    }

    /// Explicit positions of a resolved geometry.
    pub fn from_geometry(g: &RoomGeometry) -> Self {
        Self {
            dimensions_m: g.dimensions_m,
            tx_positions_m: Some(g.tx_positions_m.clone()),
            rx_positions_m: Some(g.rx_positions_m.clone()),
            tx_array: None,
            rx_array: None,
        }
    }
}

pub fn read_geometry(path: &Path) -> CliResult<RoomGeometry> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let spec: GeometrySpec =
        toml::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    spec.resolve()
}
