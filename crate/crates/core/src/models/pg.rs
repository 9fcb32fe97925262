//! Propagation-graph model of an indoor channel.
//!
//! Vertices are transmitters, receivers and `N_scat` scatterers drawn
//! uniformly in the room. Each possible Tx→scatterer, scatterer→Rx and
//! scatterer→scatterer edge exists with probability `P_vis`. Per frequency the
//! transfer matrix is `H = D + R (I − B)⁻¹ T`, which sums all bounce orders.
//!
//! Edge gains carry the propagation delay `d/c` and a uniform random phase.
//! Edges touching an antenna have amplitude `1/sqrt(4π f τ)`; an edge leaving
//! scatterer `s` towards another scatterer has amplitude `g / deg(s)`, with
//! `deg(s)` the number of such edges, so every column of `B` sums to `g` in
//! magnitude and the recursion converges for `g < 1`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::noise::{add_noise_with, check_noise_variance};
use super::ChannelModel;
use crate::abc::PriorBox;
use crate::error::{Error, Result};
use crate::math::{cos, round, sin, sqrt, PI, TAU};
use crate::rng::{derive_seed, rng_from_seed, stream};
use crate::signal::{FrequencyGrid, TransferFunctionDataset};

pub const PG_PARAMETER_NAMES: [&str; 4] = ["g", "N_scat", "P_vis", "sigma_w2"];

/// m/s
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// `θ = [g, N_scat, P_vis, σ_W²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationGraphParams {
    pub g: f64,
    pub n_scat: usize,
    pub p_vis: f64,
    pub sigma_w2: f64,
}

impl PropagationGraphParams {
    /// `N_scat` is rounded to the nearest integer.
    pub fn from_theta(theta: &[f64]) -> Result<Self> {
        if theta.len() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, found: theta.len() });
        }
        if !theta[1].is_finite() || theta[1] < 0.5 {
            return Err(Error::InvalidParameter(format!("N_scat must round to >= 1, got {}", theta[1])));
        }
        let p = Self { g: theta[0], n_scat: round(theta[1]) as usize, p_vis: theta[2], sigma_w2: theta[3] };
        p.validate()?;
        Ok(p)
    }

    pub fn to_theta(&self) -> [f64; 4] {
        [self.g, self.n_scat as f64, self.p_vis, self.sigma_w2]
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(Error::InvalidParameter(format!("reflection gain g must be >= 0, got {}", self.g)));
        }
        if self.g >= 1.0 {
            return Err(Error::DivergentGraph { g: self.g, bound: self.g });
        }
        if self.n_scat == 0 {
            return Err(Error::InvalidParameter("N_scat must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p_vis) {
            return Err(Error::InvalidParameter(format!("P_vis must lie in [0, 1], got {}", self.p_vis)));
        }
        check_noise_variance(self.sigma_w2)
    }
}

/// Room box with its antenna positions, metres.
#[derive(Debug, Clone, PartialEq)]
pub struct RoomGeometry {
    pub dimensions_m: [f64; 3],
    pub tx_positions_m: Vec<[f64; 3]>,
    pub rx_positions_m: Vec<[f64; 3]>,
}

/// `n × n` horizontal planar array centred at `centre`.
fn planar_array(centre: [f64; 3], n: usize, spacing: f64) -> Vec<[f64; 3]> {
    let offset = 0.5 * (n as f64 - 1.0) * spacing;
    let mut out = Vec::with_capacity(n * n);
    for ix in 0..n {
        for iy in 0..n {
            out.push([
                centre[0] - offset + ix as f64 * spacing,
                centre[1] - offset + iy as f64 * spacing,
                centre[2],
            ]);
        }
    }
    out
}

impl RoomGeometry {
    pub fn new(dimensions_m: [f64; 3], tx_positions_m: Vec<[f64; 3]>, rx_positions_m: Vec<[f64; 3]>) -> Result<Self> {
        let geo = Self { dimensions_m, tx_positions_m, rx_positions_m };
        geo.validate()?;
        Ok(geo)
    }

    /// 3×4×3 m room with two `n × n` arrays at half-wavelength spacing for 60 GHz.
    pub fn conference_room(n: usize) -> Result<Self> {
        let spacing = SPEED_OF_LIGHT / 60e9 / 2.0;
        Self::new(
            [3.0, 4.0, 3.0],
            planar_array([0.6, 0.8, 1.2], n, spacing),
            planar_array([2.3, 3.1, 1.2], n, spacing),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !self.dimensions_m.iter().all(|d| d.is_finite() && *d > 0.0) {
            return Err(Error::InvalidConfig(format!("room dimensions must be > 0, got {:?}", self.dimensions_m)));
        }
        if self.tx_positions_m.is_empty() || self.rx_positions_m.is_empty() {
            return Err(Error::InvalidConfig("geometry needs at least one Tx and one Rx".into()));
        }
        for p in self.tx_positions_m.iter().chain(&self.rx_positions_m) {
            let inside = p.iter().zip(&self.dimensions_m).all(|(x, d)| x.is_finite() && (0.0..=*d).contains(x));
            if !inside {
                return Err(Error::InvalidConfig(format!("antenna position {p:?} lies outside the room")));
            }
        }
        Ok(())
    }

    /// Number of Tx–Rx pairs, i.e. rows produced by one model call.
    pub fn n_pairs(&self) -> usize {
        self.tx_positions_m.len() * self.rx_positions_m.len()
    }
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
}

struct Edge {
    from: usize,
    to: usize,
    delay_s: f64,
    amplitude: f64,
    phase: f64,
}

impl Edge {
    /// A zero amplitude stands for the antenna-edge law `1/sqrt(4π f τ)`.
    fn gain(&self, f: f64) -> Complex64 {
        let amp = if self.amplitude > 0.0 { self.amplitude } else { 1.0 / sqrt(4.0 * PI * f * self.delay_s) };
        let ph = self.phase - TAU * f * self.delay_s;
        Complex64::new(amp * cos(ph), amp * sin(ph))
    }
}

/// A drawn graph: scatterers and the edge lists of `D`, `T`, `R`, `B`.
struct Graph {
    n_tx: usize,
    n_rx: usize,
    n_scat: usize,
    direct: Vec<Edge>,
    tx_scat: Vec<Edge>,
    scat_rx: Vec<Edge>,
    scat_scat: Vec<Edge>,
}

fn draw_graph<R: Rng>(rng: &mut R, p: &PropagationGraphParams, geo: &RoomGeometry, direct: bool) -> Graph {
    let dims = geo.dimensions_m;
    let scat: Vec<[f64; 3]> = (0..p.n_scat)
        .map(|_| [rng.random::<f64>() * dims[0], rng.random::<f64>() * dims[1], rng.random::<f64>() * dims[2]])
        .collect();
    let visible = |rng: &mut R| rng.random::<f64>() < p.p_vis;
    let edge = |rng: &mut R, from, to, a: &[f64; 3], b: &[f64; 3], amplitude| Edge {
        from,
        to,
        // co-located vertices would give a zero delay and an unbounded amplitude
        delay_s: distance(a, b).max(1e-6) / SPEED_OF_LIGHT,
        amplitude,
        phase: rng.random::<f64>() * TAU,
    };

    let mut g = Graph {
        n_tx: geo.tx_positions_m.len(),
        n_rx: geo.rx_positions_m.len(),
        n_scat: p.n_scat,
        direct: Vec::new(),
        tx_scat: Vec::new(),
        scat_rx: Vec::new(),
        scat_scat: Vec::new(),
    };
    if direct {
        for (t, a) in geo.tx_positions_m.iter().enumerate() {
            for (r, b) in geo.rx_positions_m.iter().enumerate() {
                let mut e = edge(rng, t, r, a, b, 0.0);
                e.phase = 0.0;
                g.direct.push(e);
            }
        }
    }
    for (t, a) in geo.tx_positions_m.iter().enumerate() {
        for (s, b) in scat.iter().enumerate() {
            if visible(rng) {
                g.tx_scat.push(edge(rng, t, s, a, b, 0.0));
            }
        }
    }
    for (s, a) in scat.iter().enumerate() {
        for (r, b) in geo.rx_positions_m.iter().enumerate() {
            if visible(rng) {
                g.scat_rx.push(edge(rng, s, r, a, b, 0.0));
            }
        }
    }
    for (s, a) in scat.iter().enumerate() {
        let first = g.scat_scat.len();
        for (s2, b) in scat.iter().enumerate() {
            if s2 != s && visible(rng) {
                g.scat_scat.push(edge(rng, s, s2, a, b, 0.0));
            }
        }
        let degree = (g.scat_scat.len() - first) as f64;
        for e in &mut g.scat_scat[first..] {
            e.amplitude = p.g / degree;
        }
    }
    g
}

impl Graph {
    /// Writes `H(f)` for every pair into column `k` of `out` (row `tx * n_rx + rx`).
    fn transfer(&self, f: f64, k: usize, n_s: usize, out: &mut [Complex64]) -> Result<()> {
        let zero = Complex64::new(0.0, 0.0);
        let mut h = DMatrix::from_element(self.n_rx, self.n_tx, zero);
        for e in &self.direct {
            h[(e.to, e.from)] += e.gain(f);
        }
        if !self.tx_scat.is_empty() && !self.scat_rx.is_empty() {
            let mut t = DMatrix::from_element(self.n_scat, self.n_tx, zero);
            for e in &self.tx_scat {
                t[(e.to, e.from)] += e.gain(f);
            }
            let mut r = DMatrix::from_element(self.n_rx, self.n_scat, zero);
            for e in &self.scat_rx {
                r[(e.to, e.from)] += e.gain(f);
            }
            let x = if self.scat_scat.is_empty() {
                t
            } else {
                let mut a = DMatrix::identity(self.n_scat, self.n_scat);
                for e in &self.scat_scat {
                    a[(e.to, e.from)] -= e.gain(f);
                }
                a.lu()
                    .solve(&t)
                    .ok_or_else(|| Error::NumericalDomain(format!("I - B is singular at {f} Hz")))?
            };
            h += r * x;
        }
        for tx in 0..self.n_tx {
            for rx in 0..self.n_rx {
                out[(tx * self.n_rx + rx) * n_s + k] = h[(rx, tx)];
            }
        }
        Ok(())
    }
}

/// Propagation-graph simulator for a fixed room geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationGraph {
    pub geometry: RoomGeometry,
    /// Include line-of-sight Tx–Rx edges. Off by default.
    pub direct_edges: bool,
}

impl PropagationGraph {
    pub fn new(geometry: RoomGeometry) -> Self {
        Self { geometry, direct_edges: false }
    }

    fn one_call(&self, p: &PropagationGraphParams, grid: &FrequencyGrid, seed: u64) -> Result<Vec<Complex64>> {
        let mut rng = rng_from_seed(seed);
        let graph = draw_graph(&mut rng, p, &self.geometry, self.direct_edges);
        let n_s = grid.n_s();
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); self.geometry.n_pairs() * n_s];
        for k in 0..n_s {
            graph.transfer(grid.frequency_hz(k), k, n_s, &mut out)?;
        }
        add_noise_with(&mut out, p.sigma_w2, &mut rng_from_seed(derive_seed(seed, stream::NOISE, 0)));
        Ok(out)
    }

    /// `n_realizations` rows; when more rows are requested than one call yields,
    /// further calls with fresh scatterers are appended.
    pub fn simulate_params(
        &self,
        p: &PropagationGraphParams,
        n_realizations: usize,
        grid: &FrequencyGrid,
        seed: u64,
    ) -> Result<TransferFunctionDataset> {
        p.validate()?;
        self.geometry.validate()?;
        if n_realizations == 0 {
            return Err(Error::InvalidParameter("need at least one realization".into()));
        }
        if grid.f_start_hz() <= 0.0 {
            return Err(Error::InvalidData("the propagation-graph model needs a grid with f_start > 0".into()));
        }
        let pairs = self.geometry.n_pairs();
        let calls = n_realizations.div_ceil(pairs);
        let mut samples = Vec::with_capacity(calls * pairs * grid.n_s());
        for c in 0..calls {
            let call_seed = if c == 0 { seed } else { derive_seed(seed, stream::MODEL_CALL, c as u64) };
            samples.extend(self.one_call(p, grid, call_seed)?);
        }
        samples.truncate(n_realizations * grid.n_s());
        TransferFunctionDataset::new(*grid, samples)
    }
}

/// One call of the propagation-graph model with `|Tx|·|Rx|` rows.
pub fn simulate_pg(
    params: &PropagationGraphParams,
    geometry: &RoomGeometry,
    grid: &FrequencyGrid,
    seed: u64,
) -> Result<TransferFunctionDataset> {
    PropagationGraph::new(geometry.clone()).simulate_params(params, geometry.n_pairs(), grid, seed)
}

/// Pool `n_calls` independent calls into one dataset of `n_rows` rows.
///
/// Call `c` contributes rows `c·n_rows/n_calls .. (c+1)·n_rows/n_calls` of its
/// own output, so no single scatterer configuration dominates.
pub fn combine_calls<M: ChannelModel + ?Sized>(
    model: &M,
    theta: &[f64],
    n_calls: usize,
    n_rows: usize,
    grid: &FrequencyGrid,
    seed: u64,
) -> Result<TransferFunctionDataset> {
    if n_calls == 0 || n_calls > n_rows {
        return Err(Error::InvalidParameter(format!("cannot split {n_rows} rows over {n_calls} calls")));
    }
    let mut parts = Vec::with_capacity(n_calls);
    for c in 0..n_calls {
        let lo = c * n_rows / n_calls;
        let hi = (c + 1) * n_rows / n_calls;
        let ds = model.simulate(theta, n_rows, grid, derive_seed(seed, stream::MODEL_CALL, c as u64))?;
        let idx: Vec<usize> = (lo..hi).collect();
        parts.push(ds.select_rows(&idx)?);
    }
    TransferFunctionDataset::concat(&parts)
}

impl ChannelModel for PropagationGraph {
    fn name(&self) -> &'static str {
        "pg"
    }

    fn parameter_names(&self) -> &'static [&'static str] {
        &PG_PARAMETER_NAMES
    }

    fn default_prior(&self) -> PriorBox {
        // g = 1 itself diverges; the box is closed, so stop just short of it
        PriorBox::from_bounds(&[
            ("g", 0.0, 1.0 - 1e-9, false),
            ("N_scat", 5.0, 35.0, true),
            ("P_vis", 0.0, 1.0, false),
            ("sigma_w2", 2e-10, 2e-9, false),
        ])
        .expect("static PG prior is valid")
    }

    fn simulate(
        &self,
        theta: &[f64],
        n_realizations: usize,
        grid: &FrequencyGrid,
        seed: u64,
    ) -> Result<TransferFunctionDataset> {
        self.simulate_params(&PropagationGraphParams::from_theta(theta)?, n_realizations, grid, seed)
    }
}
