use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::rng::rng_from_seed;

pub(crate) fn add_noise_with<R: Rng>(h: &mut [Complex64], sigma_w2: f64, rng: &mut R) {
    if sigma_w2 == 0.0 {
        return;
    }
    let s = sqrt(sigma_w2 / 2.0);
    for z in h.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *z += Complex64::new(s * re, s * im);
    }
}

pub(crate) fn check_noise_variance(sigma_w2: f64) -> Result<()> {
    if sigma_w2.is_finite() && sigma_w2 >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("noise variance must be finite and >= 0, got {sigma_w2}")))
    }
}

/// Add iid circularly symmetric complex Gaussian noise of variance `sigma_w2` per sample.
pub fn add_noise(h: &[Complex64], sigma_w2: f64, seed: u64) -> Result<Vec<Complex64>> {
    check_noise_variance(sigma_w2)?;
    let mut out = h.to_vec();
    add_noise_with(&mut out, sigma_w2, &mut rng_from_seed(seed));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_variance_is_identity() {
        let h: Vec<Complex64> = (0..50).map(|k| Complex64::new(k as f64 * 0.1, -(k as f64))).collect();
        assert_eq!(add_noise(&h, 0.0, 3).unwrap(), h);
        assert!(add_noise(&h, -1.0, 3).is_err());
    }

    #[test]
    fn noise_moments() {
        let n = 100_000;
        let sigma2 = 2.5e-9;
        let h = alloc::vec![Complex64::new(0.0, 0.0); n];
        let w = add_noise(&h, sigma2, 17).unwrap();
        let mean = w.iter().sum::<Complex64>() / n as f64;
        let var = w.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / (n - 1) as f64;
        assert!((var / sigma2 - 1.0).abs() < 0.02, "variance ratio {}", var / sigma2);
        // each component has variance sigma2/2, so the mean has standard error sqrt(sigma2/(2n))
        let se = sqrt(sigma2 / (2.0 * n as f64));
        assert!(mean.re.abs() < 3.0 * se && mean.im.abs() < 3.0 * se);
        let re_var = w.iter().map(|z| z.re * z.re).sum::<f64>() / n as f64;
        assert!((re_var / (sigma2 / 2.0) - 1.0).abs() < 0.03);
    }
}
