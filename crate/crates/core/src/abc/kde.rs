use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, sqrt};
use crate::matrix::RealMatrix;

/// Location of the highest Gaussian-KDE density among the sample points.
///
/// Product kernel with per-dimension Silverman bandwidths
/// `h_j = σ_j (4 / ((d + 2) n))^{1/(d+4)}`; dimensions with zero spread are ignored.
/// Ties go to the first row.
pub fn kde_mode(thetas: &RealMatrix) -> Result<Vec<f64>> {
    let n = thetas.rows();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let d = thetas.cols();
    let factor = libm::pow(4.0 / ((d as f64 + 2.0) * n as f64), 1.0 / (d as f64 + 4.0));
    let inv_h: Vec<f64> = thetas
        .column_variances()
        .iter()
        .map(|v| if *v > 0.0 { 1.0 / (sqrt(*v) * factor) } else { 0.0 })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0);
    for k in 0..n {
        let xk = thetas.row(k);
        let density: f64 = thetas
            .iter_rows()
            .map(|xi| {
                let q: f64 = xk.iter().zip(xi).zip(&inv_h).map(|((a, b), ih)| ((a - b) * ih) * ((a - b) * ih)).sum();
                exp(-0.5 * q)
            })
            .sum();
        if density > best.0 {
            best = (density, k);
        }
    }
    Ok(thetas.row(best.1).to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn point_mass_returns_the_point() {
        let m = RealMatrix::from_rows((0..5).map(|_| alloc::vec![1.0, -2.0, 3.5])).unwrap();
        assert_eq!(kde_mode(&m).unwrap(), [1.0, -2.0, 3.5]);
        assert!(kde_mode(&RealMatrix::zeros(1, 2)).is_err());
    }

    #[test]
    fn mode_lies_in_heavier_cluster() {
        let mut rng = rng_from_seed(8);
        let rows: Vec<Vec<f64>> = (0..100)
            .map(|i| {
                let centre = if i < 70 { 0.0 } else { 10.0 };
                let e: f64 = rng.sample(StandardNormal);
                alloc::vec![centre + e]
            })
            .collect();
        let m = RealMatrix::from_rows(rows.clone()).unwrap();
        let mode = kde_mode(&m).unwrap()[0];
        assert!(mode.abs() < 3.0, "mode {mode}");

        // direct evaluation at every sample with the same bandwidth
        let var = m.column_variances()[0];
        let h = sqrt(var) * libm::pow(4.0 / (3.0 * 100.0), 0.2);
        let dens = |x: f64| rows.iter().map(|r| exp(-0.5 * ((x - r[0]) / h) * ((x - r[0]) / h))).sum::<f64>();
        let oracle = rows.iter().map(|r| r[0]).fold((f64::NEG_INFINITY, 0.0), |acc, x| {
            let v = dens(x);
            if v > acc.0 { (v, x) } else { acc }
        });
        assert_eq!(mode, oracle.1);
    }

    #[test]
    fn mode_within_column_range() {
        let mut rng = rng_from_seed(3);
        let rows: Vec<Vec<f64>> = (0..40).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect();
        let m = RealMatrix::from_rows(rows).unwrap();
        let mode = kde_mode(&m).unwrap();
        for j in 0..3 {
            let col = m.column(j);
            let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(lo <= mode[j] && mode[j] <= hi);
        }
    }
}
