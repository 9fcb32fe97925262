//! Transfer-function dataset files: a comma-separated payload with one
//! realization per row as interleaved `re,im` pairs, and a JSON sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use chancal_core::signal::{FrequencyGrid, TransferFunctionDataset};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub n_obs: usize,
    pub n_s: usize,
    pub bandwidth_hz: f64,
    pub f_start_hz: f64,
}

impl DatasetMeta {
    pub fn of(ds: &TransferFunctionDataset) -> Self {
        let g = ds.grid();
        Self { n_obs: ds.n_obs(), n_s: g.n_s(), bandwidth_hz: g.bandwidth_hz(), f_start_hz: g.f_start_hz() }
    }

    pub fn grid(&self) -> CliResult<FrequencyGrid> {
        Ok(FrequencyGrid::with_start(self.n_s, self.bandwidth_hz, self.f_start_hz)?)
    }
}

/// `data.csv` → `data.meta.json`.
pub fn meta_path(payload: &Path) -> PathBuf {
    payload.with_extension("meta.json")
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_dataset(path: &Path, ds: &TransferFunctionDataset) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(|e| io_or(path, e))?;
    let mut record = Vec::with_capacity(2 * ds.grid().n_s());
    for row in ds.rows() {
        record.clear();
        for z in row {
            record.push(format_f64(z.re));
            record.push(format_f64(z.im));
        }
        w.write_record(&record).map_err(|e| io_or(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    let meta = serde_json::to_string_pretty(&DatasetMeta::of(ds)).expect("meta serializes");
    let mp = meta_path(path);
    fs::write(&mp, meta + "\n").map_err(|e| CliError::io(&mp, e))
}

pub fn read_meta(path: &Path) -> CliResult<DatasetMeta> {
    let mp = meta_path(path);
    let text = fs::read_to_string(&mp).map_err(|e| CliError::io(&mp, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", mp.display())))
}

pub fn read_dataset(path: &Path) -> CliResult<TransferFunctionDataset> {
    let meta = read_meta(path)?;
    let grid = meta.grid()?;
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path).map_err(|e| io_or(path, e))?;
    let mut samples = Vec::with_capacity(meta.n_obs * meta.n_s);
    let mut rows = 0;
    for record in r.records() {
        let record = record.map_err(|e| io_or(path, e))?;
        if record.len() != 2 * meta.n_s {
            return Err(CliError::Invalid(format!(
                "{}: row {rows} has {} columns, expected {}",
                path.display(),
                record.len(),
                2 * meta.n_s
            )));
        }
        let mut values = record.iter().map(|f| {
            f.trim().parse::<f64>().map_err(|e| CliError::Invalid(format!("{}: row {rows}: `{f}`: {e}", path.display())))
        });
        while let (Some(re), Some(im)) = (values.next(), values.next()) {
            samples.push(Complex64::new(re?, im?));
        }
        rows += 1;
    }
    if rows != meta.n_obs {
        return Err(CliError::Invalid(format!("{}: {rows} rows, sidecar says {}", path.display(), meta.n_obs)));
    }
    Ok(TransferFunctionDataset::new(grid, samples)?)
}

pub(crate) fn io_or(path: &Path, e: csv::Error) -> CliError {
    match CliError::from(e) {
        CliError::Io { source, .. } => CliError::io(path, source),
        CliError::Invalid(msg) => CliError::Invalid(format!("{}: {msg}", path.display())),
        other => other,
    }
}
