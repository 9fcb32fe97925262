//! The four subcommands, callable without going through argument parsing.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chancal_core::abc::{posterior_mean, posterior_std, run_pmc_abc_with_observer, PriorBox, WeightedPopulation};
use chancal_core::kernel::{median_heuristic, mmd2_unbiased};
use chancal_core::models::{combine_calls, ChannelModel};
use chancal_core::signal::{apdp, dataset_moments, log_moment_matrix, standardized_moments, TransferFunctionDataset};
use serde::Serialize;
use serde_json::json;

use crate::config::{ModelKind, RunConfig};
use crate::dataset::{format_f64, io_or, read_dataset, write_dataset};
use crate::error::{CliError, CliResult};
use crate::geometry::{read_geometry, GeometrySpec};

fn load_config(path: Option<&Path>, model: Option<ModelKind>) -> CliResult<RunConfig> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::new(model.ok_or_else(|| CliError::Invalid("give --model or --config".into()))?),
    };
    if let Some(m) = model {
        cfg.model = m;
    }
    Ok(cfg)
}

fn apply_geometry(cfg: &mut RunConfig, geometry: Option<&Path>, direct: bool) -> CliResult<()> {
    if let Some(p) = geometry {
        cfg.geometry = Some(GeometrySpec::from_geometry(&read_geometry(p)?));
    }
    cfg.direct_edges |= direct;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    write_text(path, &(serde_json::to_string_pretty(value).expect("json serializes") + "\n"))
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

#[derive(Debug, Clone, Default)]
pub struct SimulateArgs {
    pub model: Option<ModelKind>,
    pub theta: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub config: Option<PathBuf>,
    pub geometry: Option<PathBuf>,
    pub direct: bool,
    /// Pool this many independent model calls into the output rows.
    pub calls: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateReport {
    pub seed: u64,
    pub theta: Vec<f64>,
    pub rows: usize,
}

pub fn simulate(args: &SimulateArgs) -> CliResult<SimulateReport> {
    let mut cfg = load_config(args.config.as_deref(), args.model)?;
    apply_geometry(&mut cfg, args.geometry.as_deref(), args.direct)?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let model = cfg.build_model()?;
    let prior = cfg.prior(&model)?;
    let grid = cfg.grid()?;
    let theta = match &args.theta {
        Some(t) => t.clone(),
        None => prior.midpoint(),
    };
    if theta.len() != prior.dim() {
        return Err(CliError::Invalid(format!(
            "{} model takes {} parameters ({}), got {}",
            model.name(),
            prior.dim(),
            prior.names().join(", "),
            theta.len()
        )));
    }
    if !prior.contains(&theta) {
        log::warn!("parameters {theta:?} lie outside the prior box");
    }
    let n = args.n.unwrap_or_else(|| cfg.n_sim(&model));
    let sim_theta = prior.for_simulation(&theta);
    let ds = if args.calls > 1 {
        combine_calls(&model, &sim_theta, args.calls, n, &grid, seed)?
    } else {
        model.simulate(&sim_theta, n, &grid, seed)?
    };
    write_dataset(&args.out, &ds)?;
    Ok(SimulateReport { seed, theta, rows: ds.n_obs() })
}

#[derive(Debug, Clone, Default)]
pub struct CalibrateArgs {
    pub config: PathBuf,
    pub data: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub model: Option<ModelKind>,
}

fn write_population(path: &Path, prior: &PriorBox, pop: &WeightedPopulation) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_or(path, e))?;
    let mut header: Vec<String> = prior.names().to_vec();
    header.push("weight".into());
    header.push("mmd2".into());
    w.write_record(&header)?;
    for (i, row) in pop.thetas_adjusted.iter_rows().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| format_f64(*v)).collect();
        rec.push(format_f64(pop.weights[i]));
        rec.push(format_f64(pop.mmd2[i]));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// `4.7e-8 (4.6e-9)`.
pub fn table_style(mean: f64, std: f64) -> String {
    format!("{mean:.1e} ({std:.1e})")
}

fn estimate_json(prior: &PriorBox, pop: &WeightedPopulation) -> serde_json::Value {
    let mean = posterior_mean(pop);
    let std = posterior_std(pop);
    let params: Vec<_> = prior
        .names()
        .iter()
        .enumerate()
        .map(|(j, n)| json!({ "name": n, "mean": mean[j], "std": std[j], "estimate": table_style(mean[j], std[j]) }))
        .collect();
    json!({ "iteration": pop.iteration, "parameters": params })
}

pub fn calibrate(args: &CalibrateArgs) -> CliResult<()> {
    let started = Instant::now();
    let mut cfg = load_config(Some(&args.config), args.model)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let data = read_dataset(&args.data)?;
    let model = cfg.build_model()?;
    let prior = cfg.prior(&model)?;
    let pmc = cfg.pmc_config(&model);
    create_dir(&args.out)?;
    write_text(&args.out.join("config.toml"), &cfg.resolved(&model, data.grid())?.to_toml())?;

    let mut iterations = Vec::new();
    let mut write_error = None;
    let result = run_pmc_abc_with_observer(&model, &data, &prior, &pmc, |pop| {
        let path = args.out.join(format!("posterior_t{}.csv", pop.iteration));
        if let Err(e) = write_population(&path, &prior, pop) {
            write_error.get_or_insert(e);
        }
        let elapsed = started.elapsed().as_secs_f64();
        log::info!("iteration {} done after {elapsed:.1} s", pop.iteration);
        iterations.push(json!({
            "iteration": pop.iteration,
            "sigma_diag": pop.sigma_diag,
            "mmd2_min": pop.mmd2.first(),
            "mmd2_max": pop.mmd2.last(),
            "elapsed_s": elapsed,
        }));
    });
    if let Some(e) = write_error {
        return Err(e);
    }
    let (run, failure) = match result {
        Ok(run) => (run, None),
        Err(f) => (f.partial.clone(), Some(f)),
    };
    let diagnostics = json!({
        "model": model.name(),
        "seed": cfg.seed,
        "data": args.data.display().to_string(),
        "parameters": prior.names(),
        "lengthscale": run.lengthscale.map(|l| l.get()),
        "misspecified": run.misspecification.flagged,
        "misspecified_coordinates": run.misspecification.outside,
        "s_obs": run.s_obs.as_ref().map(|s| s.values.clone()),
        "iterations": iterations,
        "runtime_s": started.elapsed().as_secs_f64(),
        "completed": failure.is_none(),
        "error": failure.as_ref().map(|f| f.to_string()),
    });
    write_json(&args.out.join("diagnostics.json"), &diagnostics)?;
    if let Some(last) = run.populations.last() {
        write_json(&args.out.join("estimate.json"), &estimate_json(&prior, last))?;
    }
    match failure {
        Some(f) => Err(CliError::Calibration(Box::new(f))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmdReport {
    pub mmd2: f64,
    pub lengthscale: f64,
}

/// MMD² between the log moments of two dataset files, lengthscale from `a`.
pub fn mmd(a: &Path, b: &Path, i_moments: usize) -> CliResult<MmdReport> {
    let da = read_dataset(a)?;
    let db = read_dataset(b)?;
    if !da.grid().same_sampling(db.grid()) {
        return Err(CliError::Invalid(format!(
            "frequency grids differ: {:?} vs {:?}",
            da.grid(),
            db.grid()
        )));
    }
    let za = log_moment_matrix(&da, i_moments)?;
    let zb = log_moment_matrix(&db, i_moments)?;
    let l = median_heuristic(za.matrix())?;
    let est = mmd2_unbiased(za.matrix(), zb.matrix(), l)?;
    Ok(MmdReport { mmd2: est.value, lengthscale: l.get() })
}

#[derive(Debug, Clone, Default)]
pub struct ValidateArgs {
    pub data: PathBuf,
    pub posterior: PathBuf,
    pub model: Option<ModelKind>,
    pub config: Option<PathBuf>,
    pub geometry: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateReport {
    pub theta: Vec<f64>,
    /// Two-sample Kolmogorov-Smirnov distances for P0, mean delay and RMS delay spread.
    pub ks_p0: f64,
    pub ks_mean_delay: f64,
    pub ks_rms_delay_spread: f64,
}

/// Plain column means of the parameter columns of a posterior table, matching
/// the posterior mean of the calibration output.
pub fn read_posterior_mean(path: &Path, names: &[String]) -> CliResult<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_or(path, e))?;
    let header = r.headers()?.clone();
    let cols: Vec<usize> = names
        .iter()
        .map(|n| {
            header.iter().position(|h| h == n).ok_or_else(|| {
                CliError::Invalid(format!("{}: no column `{n}` in posterior table", path.display()))
            })
        })
        .collect::<CliResult<_>>()?;
    let mut sums = vec![0.0; names.len()];
    let mut rows = 0usize;
    for rec in r.records() {
        let rec = rec?;
        for (s, &c) in sums.iter_mut().zip(&cols) {
            let field = rec.get(c).unwrap_or("").trim();
            *s += field
                .parse::<f64>()
                .map_err(|e| CliError::Invalid(format!("{}: `{field}`: {e}", path.display())))?;
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(CliError::Invalid(format!("{}: posterior table is empty", path.display())));
    }
    Ok(sums.iter().map(|s| s / rows as f64).collect())
}

fn stats(ds: &TransferFunctionDataset) -> CliResult<[Vec<f64>; 3]> {
    let m = dataset_moments(ds, 3)?;
    let mut out = [Vec::new(), Vec::new(), Vec::new()];
    for row in m.iter_rows() {
        let s = standardized_moments(row)?;
        out[0].push(s.p0);
        out[1].push(s.mean_delay_s);
        out[2].push(s.rms_delay_spread_s);
    }
    Ok(out)
}

/// Sorted values with their empirical CDF levels `k / n`.
pub fn empirical_cdf(values: &[f64]) -> Vec<(f64, f64)> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.into_iter().enumerate().map(|(k, x)| (x, (k + 1) as f64 / n)).collect()
}

/// Two-sample Kolmogorov-Smirnov distance `sup |F_a - F_b|`.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

fn write_cdf(path: &Path, data: &[f64], model: &[f64]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_or(path, e))?;
    w.write_record(["source", "value", "cdf"])?;
    for (source, values) in [("data", data), ("model", model)] {
        for (x, f) in empirical_cdf(values) {
            w.write_record([source.to_string(), format_f64(x), format_f64(f)])?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn validate(args: &ValidateArgs) -> CliResult<ValidateReport> {
    let mut cfg = load_config(args.config.as_deref(), args.model)?;
    apply_geometry(&mut cfg, args.geometry.as_deref(), false)?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let data = read_dataset(&args.data)?;
    let model = cfg.build_model()?;
    let prior = cfg.prior(&model)?;
    let theta = read_posterior_mean(&args.posterior, prior.names())?;
    let sim = model.simulate(&prior.for_simulation(&theta), data.n_obs(), data.grid(), seed)?;
    create_dir(&args.out)?;

    let dt = data.grid().delta_t_s();
    let to_db = |p: f64| 10.0 * p.log10();
    let (a_data, a_model) = (apdp(&data), apdp(&sim));
    let apdp_path = args.out.join("apdp.csv");
    let mut w = csv::Writer::from_path(&apdp_path).map_err(|e| io_or(&apdp_path, e))?;
    w.write_record(["delay_s", "data_db", "model_db"])?;
    for (k, (pd, pm)) in a_data.iter().zip(&a_model).enumerate() {
        w.write_record([format_f64(k as f64 * dt), format_f64(to_db(*pd)), format_f64(to_db(*pm))])?;
    }
    w.flush().map_err(|e| CliError::io(&apdp_path, e))?;

    let sd = stats(&data)?;
    let sm = stats(&sim)?;
    let names = ["p0", "mean_delay", "rms_delay_spread"];
    let mut ks = [0.0; 3];
    for k in 0..3 {
        write_cdf(&args.out.join(format!("cdf_{}.csv", names[k])), &sd[k], &sm[k])?;
        ks[k] = ks_distance(&sd[k], &sm[k]);
    }
    write_json(
        &args.out.join("validation.json"),
        &json!({
            "model": model.name(),
            "seed": seed,
            "parameters": prior.names(),
            "theta": theta,
            "ks": { "p0": ks[0], "mean_delay": ks[1], "rms_delay_spread": ks[2] },
        }),
    )?;
    Ok(ValidateReport { theta, ks_p0: ks[0], ks_mean_delay: ks[1], ks_rms_delay_spread: ks[2] })
}
