//! Saleh-Valenzuela clustered multipath model.
//!
//! Cluster onsets form a homogeneous Poisson process of rate `Λ` on
//! `[0, t_max)`. Within a cluster starting at `T`, the first ray sits at the
//! onset and further rays follow a Poisson process of rate `λ` up to the end of
//! the window; anything at or beyond `t_max` is discarded. Ray gains are
//! zero-mean circular complex Gaussian with variance `Q exp(-T/Γ) exp(-τ/γ)`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use super::noise::{add_noise_with, check_noise_variance};
use super::ChannelModel;
use crate::abc::PriorBox;
use crate::error::{Error, Result};
use crate::math::{cos, exp, sin, sqrt, TAU};
use crate::rng::{derive_seed, rng_from_seed, stream};
use crate::signal::{FrequencyGrid, TransferFunctionDataset};

pub const SV_PARAMETER_NAMES: [&str; 6] = ["Q", "Lambda", "lambda", "Gamma", "gamma", "sigma_w2"];

/// `θ = [Q, Λ, λ, Γ, γ, σ_W²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SalehValenzuelaParams {
    /// Mean power of the first arriving component.
    pub q: f64,
    /// Cluster arrival rate, 1/s.
    pub big_lambda: f64,
    /// Ray arrival rate, 1/s.
    pub small_lambda: f64,
    /// Cluster power decay constant, s.
    pub big_gamma: f64,
    /// Ray power decay constant, s.
    pub small_gamma: f64,
    /// Noise variance per frequency sample.
    pub sigma_w2: f64,
}

impl SalehValenzuelaParams {
    pub fn from_theta(theta: &[f64]) -> Result<Self> {
        if theta.len() != 6 {
            return Err(Error::DimensionMismatch { expected: 6, found: theta.len() });
        }
        let p = Self {
            q: theta[0],
            big_lambda: theta[1],
            small_lambda: theta[2],
            big_gamma: theta[3],
            small_gamma: theta[4],
            sigma_w2: theta[5],
        };
        p.validate()?;
        Ok(p)
    }

    pub fn to_theta(&self) -> [f64; 6] {
        [self.q, self.big_lambda, self.small_lambda, self.big_gamma, self.small_gamma, self.sigma_w2]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in SV_PARAMETER_NAMES.iter().zip(&self.to_theta()[..5]) {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::InvalidParameter(format!("S-V parameter {name} must be finite and > 0, got {v}")));
            }
        }
        check_noise_variance(self.sigma_w2)
    }

    /// `Λ λ t_max²`, the scale of the number of paths per realization.
    pub fn expected_paths(&self, t_max_s: f64) -> f64 {
        self.big_lambda * self.small_lambda * t_max_s * t_max_s
    }
}

/// Multipath components of one realization, in generation order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SvRealization {
    pub cluster_onsets_s: Vec<f64>,
    /// Absolute delays `T_l + τ_kl`.
    pub delays_s: Vec<f64>,
    pub gains: Vec<Complex64>,
}

/// Complex gain of a ray at cluster onset `t_cluster` and intra-cluster offset `tau`.
pub fn ray_gain<R: Rng>(
    rng: &mut R,
    params: &SalehValenzuelaParams,
    t_cluster: f64,
    tau: f64,
) -> Complex64 {
    let var = params.q * exp(-t_cluster / params.big_gamma) * exp(-tau / params.small_gamma);
    let s = sqrt(var / 2.0);
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Draw the clusters and rays of one realization on `[0, t_max)`.
pub fn draw_realization<R: Rng>(rng: &mut R, params: &SalehValenzuelaParams, t_max_s: f64) -> SvRealization {
    let mut out = SvRealization::default();
    let mut onset = 0.0;
    loop {
        let gap: f64 = rng.sample(Exp1);
        onset += gap / params.big_lambda;
        if onset >= t_max_s {
            break;
        }
        out.cluster_onsets_s.push(onset);
    }
    for &onset in &out.cluster_onsets_s {
        let window = t_max_s - onset;
        let mut tau = 0.0;
        while tau < window {
            out.delays_s.push(onset + tau);
            out.gains.push(ray_gain(rng, params, onset, tau));
            let gap: f64 = rng.sample(Exp1);
            tau += gap / params.small_lambda;
        }
    }
    out
}

/// Phasor buffers reused across realizations.
#[derive(Default)]
struct Synthesizer {
    cur_re: Vec<f64>,
    cur_im: Vec<f64>,
    step_re: Vec<f64>,
    step_im: Vec<f64>,
}

impl Synthesizer {
    /// `H_n = Σ_p β_p exp(-j2π n Δf τ_p)` for `n = 0..N_s`, by phasor recursion.
    fn synthesize(&mut self, paths: &SvRealization, delta_f: f64, out: &mut [Complex64]) {
        self.cur_re.clear();
        self.cur_im.clear();
        self.step_re.clear();
        self.step_im.clear();
        for (tau, beta) in paths.delays_s.iter().zip(&paths.gains) {
            let phase = TAU * delta_f * tau;
            self.cur_re.push(beta.re);
            self.cur_im.push(beta.im);
            self.step_re.push(cos(phase));
            self.step_im.push(-sin(phase));
        }
        let len = self.cur_re.len();
        let split = len - len % 4;
        for h in out.iter_mut() {
            let mut acc_re = [0.0f64; 4];
            let mut acc_im = [0.0f64; 4];
            for (cr, ci) in self.cur_re[..split].chunks_exact(4).zip(self.cur_im[..split].chunks_exact(4)) {
                for lane in 0..4 {
                    acc_re[lane] += cr[lane];
                    acc_im[lane] += ci[lane];
                }
            }
            let mut re = (acc_re[0] + acc_re[1]) + (acc_re[2] + acc_re[3]);
            let mut im = (acc_im[0] + acc_im[1]) + (acc_im[2] + acc_im[3]);
            for p in split..len {
                re += self.cur_re[p];
                im += self.cur_im[p];
            }
            *h = Complex64::new(re, im);
            for (((cr, ci), sr), si) in
                self.cur_re.iter_mut().zip(self.cur_im.iter_mut()).zip(&self.step_re).zip(&self.step_im)
            {
                let r = *cr * sr - *ci * si;
                *ci = *cr * si + *ci * sr;
                *cr = r;
            }
        }
    }
}

/// S-V simulator with a configurable guard on the expected path count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SalehValenzuela {
    pub path_cap: f64,
}

impl Default for SalehValenzuela {
    fn default() -> Self {
        Self { path_cap: 1e6 }
    }
}

impl SalehValenzuela {
    pub fn simulate_params(
        &self,
        params: &SalehValenzuelaParams,
        n_realizations: usize,
        grid: &FrequencyGrid,
        seed: u64,
    ) -> Result<TransferFunctionDataset> {
        params.validate()?;
        if n_realizations == 0 {
            return Err(Error::InvalidParameter("need at least one realization".into()));
        }
        let t_max = grid.t_max_s();
        let expected_paths = params.expected_paths(t_max);
        if expected_paths > self.path_cap {
            return Err(Error::ResourceGuard { expected_paths, cap: self.path_cap });
        }
        let n_s = grid.n_s();
        let mut rng = rng_from_seed(seed);
        let mut samples = alloc::vec![Complex64::new(0.0, 0.0); n_realizations * n_s];
        let mut synth = Synthesizer::default();
        for row in samples.chunks_exact_mut(n_s) {
            let paths = draw_realization(&mut rng, params, t_max);
            synth.synthesize(&paths, grid.delta_f_hz(), row);
        }
        let mut noise_rng = rng_from_seed(derive_seed(seed, stream::NOISE, 0));
        add_noise_with(&mut samples, params.sigma_w2, &mut noise_rng);
        TransferFunctionDataset::new(*grid, samples)
    }
}

/// Simulate `n_realizations` independent S-V realizations with the default path cap.
pub fn simulate_sv(
    params: &SalehValenzuelaParams,
    n_realizations: usize,
    grid: &FrequencyGrid,
    seed: u64,
) -> Result<TransferFunctionDataset> {
    SalehValenzuela::default().simulate_params(params, n_realizations, grid, seed)
}

impl ChannelModel for SalehValenzuela {
    fn name(&self) -> &'static str {
        "sv"
    }

    fn parameter_names(&self) -> &'static [&'static str] {
        &SV_PARAMETER_NAMES
    }

    fn default_prior(&self) -> PriorBox {
        PriorBox::from_bounds(&[
            ("Q", 1e-9, 1e-7, false),
            ("Lambda", 5e6, 1e8, false),
            ("lambda", 5e7, 3e9, false),
            ("Gamma", 5e-9, 5e-8, false),
            ("gamma", 5e-10, 5e-9, false),
            ("sigma_w2", 2e-10, 2e-9, false),
        ])
        .expect("static S-V prior is valid")
    }

    fn simulate(
        &self,
        theta: &[f64],
        n_realizations: usize,
        grid: &FrequencyGrid,
        seed: u64,
    ) -> Result<TransferFunctionDataset> {
        self.simulate_params(&SalehValenzuelaParams::from_theta(theta)?, n_realizations, grid, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth() -> SalehValenzuelaParams {
        SalehValenzuelaParams::from_theta(&[5e-8, 2e7, 1e9, 1e-8, 2e-9, 1e-9]).unwrap()
    }

    #[test]
    fn cluster_count_is_poisson() {
        let p = truth();
        let t_max = 200e-9;
        let mut rng = rng_from_seed(1);
        let n = 2000;
        let counts: Vec<f64> =
            (0..n).map(|_| draw_realization(&mut rng, &p, t_max).cluster_onsets_s.len() as f64).collect();
        let mean = counts.iter().sum::<f64>() / n as f64;
        let expected = p.big_lambda * t_max;
        // Poisson: variance equals the mean
        let se = sqrt(expected / n as f64);
        assert!((mean - expected).abs() < 3.0 * se, "mean {mean} vs {expected}");
    }

    #[test]
    fn first_ray_power_is_q() {
        let p = truth();
        let mut rng = rng_from_seed(2);
        let n = 10_000;
        let mean_power = (0..n).map(|_| ray_gain(&mut rng, &p, 0.0, 0.0).norm_sqr()).sum::<f64>() / n as f64;
        assert!((mean_power / p.q - 1.0).abs() < 0.05, "ratio {}", mean_power / p.q);
    }

    #[test]
    fn delays_stay_inside_the_window() {
        let p = SalehValenzuelaParams::from_theta(&[5e-8, 1e8, 3e9, 1e-8, 2e-9, 0.0]).unwrap();
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let r = draw_realization(&mut rng, &p, 200e-9);
            assert!(r.delays_s.iter().all(|&t| (0.0..200e-9).contains(&t)));
            assert_eq!(r.delays_s.len(), r.gains.len());
            // every cluster contributes its onset ray
            for onset in &r.cluster_onsets_s {
                assert!(r.delays_s.contains(onset));
            }
        }
    }

    #[test]
    fn synthesis_matches_direct_sum() {
        let p = truth();
        let grid = FrequencyGrid::new(101, 1e9).unwrap();
        let mut rng = rng_from_seed(4);
        let paths = draw_realization(&mut rng, &p, grid.t_max_s());
        let mut fast = alloc::vec![Complex64::new(0.0, 0.0); 101];
        Synthesizer::default().synthesize(&paths, grid.delta_f_hz(), &mut fast);
        for (n, h) in fast.iter().enumerate() {
            let mut direct = Complex64::new(0.0, 0.0);
            for (tau, beta) in paths.delays_s.iter().zip(&paths.gains) {
                let ph = -TAU * n as f64 * grid.delta_f_hz() * tau;
                direct += beta * Complex64::new(cos(ph), sin(ph));
            }
            assert!((h - direct).norm() <= 1e-12 * direct.norm().max(p.q.sqrt()), "n = {n}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let grid = FrequencyGrid::new(64, 4e9).unwrap();
        let a = simulate_sv(&truth(), 5, &grid, 9).unwrap();
        let b = simulate_sv(&truth(), 5, &grid, 9).unwrap();
        let c = simulate_sv(&truth(), 5, &grid, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn vanishing_power_without_noise() {
        let p = SalehValenzuelaParams::from_theta(&[1e-300, 2e7, 1e9, 1e-8, 2e-9, 0.0]).unwrap();
        let grid = FrequencyGrid::new(64, 4e9).unwrap();
        let ds = simulate_sv(&p, 20, &grid, 5).unwrap();
        let m0 = crate::signal::dataset_moments(&ds, 1).unwrap();
        assert!(m0.as_slice().iter().all(|&m| m < 1e-290));
    }

    #[test]
    fn path_cap_guard() {
        let p = SalehValenzuelaParams::from_theta(&[5e-8, 1e9, 1e11, 1e-8, 2e-9, 1e-9]).unwrap();
        let grid = FrequencyGrid::mmwave_default();
        assert!(matches!(simulate_sv(&p, 1, &grid, 0), Err(Error::ResourceGuard { .. })));
        let tight = SalehValenzuela { path_cap: 100.0 };
        assert!(matches!(tight.simulate_params(&truth(), 1, &grid, 0), Err(Error::ResourceGuard { .. })));
    }

    #[test]
    fn parameter_validation() {
        assert!(SalehValenzuelaParams::from_theta(&[0.0, 2e7, 1e9, 1e-8, 2e-9, 1e-9]).is_err());
        assert!(SalehValenzuelaParams::from_theta(&[5e-8, 2e7, 1e9, 1e-8, 2e-9, -1e-9]).is_err());
        assert!(SalehValenzuelaParams::from_theta(&[5e-8, 2e7]).is_err());
        let model = SalehValenzuela::default();
        assert!(model.default_prior().contains(&truth().to_theta()));
    }
}
