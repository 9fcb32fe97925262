use alloc::format;

use super::Lengthscale;
use crate::error::{Error, Result};
use crate::math::{exp, sqrt};

/// MMD² between `N(mu1, sigma1²)` and `N(mu2, sigma2²)` under the squared-exponential kernel.
pub fn mmd2_gaussian_closed_form(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64, l: Lengthscale) -> Result<f64> {
    for (name, v) in [("mu1", mu1), ("mu2", mu2)] {
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
        }
    }
    for (name, v) in [("sigma1", sigma1), ("sigma2", sigma2)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {v}")));
        }
    }
    let l = l.get();
    // E k(X, X') for X - X' ~ N(m, v) is l / sqrt(l² + 2v) · exp(-m² / (l² + 2v)).
    let v1 = 2.0 * sigma1 * sigma1;
    let v2 = 2.0 * sigma2 * sigma2;
    // Grouped so that identical inputs cancel exactly.
    let self1 = l / sqrt(l * l + (v1 + v1));
    let self2 = l / sqrt(l * l + (v2 + v2));
    let d = mu1 - mu2;
    let denom = l * l + (v1 + v2);
    let cross = 2.0 * (l / sqrt(denom)) * exp(-d * d / denom);
    Ok(((self1 + self2) - cross).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(v: f64) -> Lengthscale {
        Lengthscale::new(v).unwrap()
    }

    #[test]
    fn identical_distributions_give_zero() {
        for &(m, s) in &[(0.0, 1.0), (3.5, 0.2), (-1.0, 0.0), (1e3, 17.0)] {
            for lv in [0.1, 1.0, 10.0] {
                assert_eq!(mmd2_gaussian_closed_form(m, s, m, s, l(lv)).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn point_masses() {
        for &(m1, m2, lv) in &[(0.0, 1.0, 1.0), (2.0, -1.0, 0.5), (0.3, 0.4, 3.0)] {
            let got = mmd2_gaussian_closed_form(m1, 0.0, m2, 0.0, l(lv)).unwrap();
            let want = 2.0 - 2.0 * exp(-(m1 - m2) * (m1 - m2) / (lv * lv));
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn positive_when_distributions_differ() {
        assert!(mmd2_gaussian_closed_form(0.0, 1.0, 0.1, 1.0, l(1.0)).unwrap() > 0.0);
        assert!(mmd2_gaussian_closed_form(0.0, 1.0, 0.0, 1.1, l(1.0)).unwrap() > 0.0);
    }

    #[test]
    fn matches_numerical_integration() {
        // midpoint-rule evaluation of the three Gaussian kernel expectations
        let (m1, s1, m2, s2, lv) = (0.0, 1.0, 1.0, 1.5, 1.0);
        let expect = |ma: f64, sa: f64, mb: f64, sb: f64| {
            // X - Y ~ N(ma - mb, sa² + sb²)
            let (m, v) = (ma - mb, sa * sa + sb * sb);
            let h = 1e-3;
            (0..40_000)
                .map(|k| {
                    let z = -20.0 + (k as f64 + 0.5) * h;
                    let pdf = exp(-(z - m) * (z - m) / (2.0 * v)) / sqrt(2.0 * core::f64::consts::PI * v);
                    pdf * exp(-z * z / (lv * lv)) * h
                })
                .sum::<f64>()
        };
        let want = expect(m1, s1, m1, s1) + expect(m2, s2, m2, s2) - 2.0 * expect(m1, s1, m2, s2);
        let got = mmd2_gaussian_closed_form(m1, s1, m2, s2, l(lv)).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn rejects_negative_sigma() {
        assert!(mmd2_gaussian_closed_form(0.0, -1.0, 0.0, 1.0, l(1.0)).is_err());
        assert!(mmd2_gaussian_closed_form(f64::NAN, 1.0, 0.0, 1.0, l(1.0)).is_err());
    }
}
