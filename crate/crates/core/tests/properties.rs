use chancal_core::kernel::{gram_matrix, mmd2_gaussian_closed_form, mmd2_unbiased, median_heuristic, Lengthscale, TransferFunctionKernel};
use chancal_core::models::{ChannelModel, SalehValenzuela};
use chancal_core::rng::rng_from_seed;
use chancal_core::signal::{
    log_moment_matrix, temporal_moments, to_frequency_domain, to_time_domain, FrequencyGrid, TimeDomainSignal,
};
use chancal_core::RealMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn complex_row(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), n).prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

proptest! {
    #[test]
    fn parseval(row in (2usize..300).prop_flat_map(complex_row), bw in 1e6f64..1e10) {
        let grid = FrequencyGrid::new(row.len(), bw).unwrap();
        let sig = to_time_domain(&row, &grid).unwrap();
        let m0 = temporal_moments(&sig, 1).unwrap()[0];
        let n = row.len() as f64;
        let expected = grid.t_max_s() / (n * n) * row.iter().map(|z| z.norm_sqr()).sum::<f64>();
        prop_assert!((m0 - expected).abs() <= 1e-10 * expected.abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn time_then_frequency_is_identity(values in (2usize..300).prop_flat_map(complex_row)) {
        let grid = FrequencyGrid::new(values.len(), 4e9).unwrap();
        let sig = TimeDomainSignal { grid, values: values.clone() };
        let back = to_time_domain(&to_frequency_domain(&sig), &grid).unwrap();
        let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for (a, b) in back.values.iter().zip(&values) {
            prop_assert!((a - b).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn moments_monotone_under_domination(
        base in proptest::collection::vec(0.0f64..10.0, 2..200),
        extra in proptest::collection::vec(0.0f64..10.0, 200),
    ) {
        let grid = FrequencyGrid::new(base.len(), 4e9).unwrap();
        let small = TimeDomainSignal { grid, values: base.iter().map(|a| Complex64::new(a.sqrt(), 0.0)).collect() };
        let big = TimeDomainSignal {
            grid,
            values: base.iter().zip(&extra).map(|(a, e)| Complex64::new(0.0, (a + e).sqrt())).collect(),
        };
        let ms = temporal_moments(&small, 5).unwrap();
        let mb = temporal_moments(&big, 5).unwrap();
        for (a, b) in ms.iter().zip(&mb) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn transforms_are_pure(row in (2usize..64).prop_flat_map(complex_row)) {
        let grid = FrequencyGrid::new(row.len(), 1e9).unwrap();
        prop_assert_eq!(to_time_domain(&row, &grid).unwrap(), to_time_domain(&row, &grid).unwrap());
    }

    #[test]
    fn gram_is_psd(n in 2usize..40, d in 1usize..5, seed in 0u64..1000, lv in 0.05f64..20.0) {
        let mut rng = rng_from_seed(seed);
        let x = RealMatrix::new(n, d, (0..n * d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()).unwrap();
        let g = gram_matrix(&x, Lengthscale::new(lv).unwrap());
        let m = nalgebra::DMatrix::from_row_slice(n, n, g.as_slice());
        prop_assert_eq!(&m, &m.transpose());
        let min_eig = m.symmetric_eigen().eigenvalues.min();
        prop_assert!(min_eig >= -1e-8, "min eigenvalue {}", min_eig);
    }

    #[test]
    fn mmd_symmetric(nx in 2usize..30, ny in 2usize..30, seed in 0u64..1000) {
        let mut rng = rng_from_seed(seed);
        let x = RealMatrix::new(nx, 3, (0..nx * 3).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()).unwrap();
        let y = RealMatrix::new(ny, 3, (0..ny * 3).map(|_| 0.5 + rng.sample::<f64, _>(StandardNormal)).collect()).unwrap();
        let l = median_heuristic(&x).unwrap();
        prop_assert_eq!(mmd2_unbiased(&x, &y, l).unwrap().value, mmd2_unbiased(&y, &x, l).unwrap().value);
    }
}

fn gaussian(n: usize, mu: f64, sigma: f64, rng: &mut impl Rng) -> RealMatrix {
    RealMatrix::new(n, 1, (0..n).map(|_| mu + sigma * rng.sample::<f64, _>(StandardNormal)).collect()).unwrap()
}

#[test]
fn estimator_error_shrinks_with_sample_size() {
    let l = Lengthscale::new(1.0).unwrap();
    let exact = mmd2_gaussian_closed_form(0.0, 1.0, 1.0, 1.5, l).unwrap();
    let mut rng = rng_from_seed(99);
    let errors: Vec<f64> = [125, 250, 500, 1000]
        .iter()
        .map(|&n| {
            (0..100)
                .map(|_| (mmd2_unbiased(&gaussian(n, 0.0, 1.0, &mut rng), &gaussian(n, 1.0, 1.5, &mut rng), l).unwrap().value - exact).abs())
                .sum::<f64>()
                / 100.0
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

#[test]
fn transfer_kernel_matches_log_moment_mmd() {
    let grid = FrequencyGrid::with_start(128, 4e9, 58e9).unwrap();
    let model = SalehValenzuela::default();
    let a = model.simulate(&[5e-8, 2e7, 1e9, 1e-8, 2e-9, 1e-9], 30, &grid, 1).unwrap();
    let b = model.simulate(&[2e-8, 6e7, 1e8, 2e-8, 1e-9, 5e-10], 40, &grid, 2).unwrap();
    let za = log_moment_matrix(&a, 4).unwrap();
    let zb = log_moment_matrix(&b, 4).unwrap();
    let l = median_heuristic(za.matrix()).unwrap();
    let via_kernel = TransferFunctionKernel::new(4, l).mmd2(&a, &b).unwrap().value;
    let via_moments = mmd2_unbiased(za.matrix(), zb.matrix(), l).unwrap().value;
    assert_eq!(via_kernel, via_moments);

    // single kernel evaluations agree with the SE kernel on the moment rows
    let k = TransferFunctionKernel::new(4, l).eval(a.row(0), b.row(3), &grid).unwrap();
    let direct = chancal_core::kernel::se_kernel(za.matrix().row(0), zb.matrix().row(3), l).unwrap();
    assert_eq!(k, direct);
}

#[test]
fn sv_halves_are_indistinguishable() {
    // MMD² between two halves of one dataset should centre on zero
    let grid = FrequencyGrid::with_start(256, 4e9, 58e9).unwrap();
    let model = SalehValenzuela::default();
    let values: Vec<f64> = (0..30)
        .map(|seed| {
            let ds = model.simulate(&[5e-8, 2e7, 1e9, 1e-8, 2e-9, 1e-9], 100, &grid, seed).unwrap();
            let z = log_moment_matrix(&ds, 4).unwrap().into_matrix();
            let first = RealMatrix::from_rows(z.iter_rows().take(50)).unwrap();
            let second = RealMatrix::from_rows(z.iter_rows().skip(50)).unwrap();
            let l = median_heuristic(&first).unwrap();
            mmd2_unbiased(&first, &second, l).unwrap().value
        })
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mean.abs() < 3.0 * sd / n.sqrt(), "mean {mean}, sd {sd}");
}
