//! Standard normal density and distribution function.
//!
//! `Φ` goes through `erfc` so that both tails keep full relative accuracy;
//! `log Φ` switches to the asymptotic tail series once `erfc` would
//! underflow.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

/// `1/√(2π)`
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

// Below this point ln(erfc) is replaced by the Mills-ratio expansion. The
// truncated series has relative error < 945/z^10 ≈ 2e-12 here.
const LOG_CDF_ASYMPTOTIC_BELOW: f64 = -30.0;

pub fn gaussian_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * libm::exp(-0.5 * z * z)
}

/// Natural log of the standard normal density.
pub fn log_gaussian_pdf(z: f64) -> f64 {
    -0.5 * z * z - 0.5 * libm::log(2.0 * PI)
}

pub fn gaussian_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// `ln Φ(z)`, finite for every finite `z`.
pub fn log_gaussian_cdf(z: f64) -> f64 {
    if z > -1.0 {
        // ln(1 - Q(z)) with Q the upper tail, exact near Φ ≈ 1.
        libm::log1p(-0.5 * libm::erfc(z * FRAC_1_SQRT_2))
    } else if z > LOG_CDF_ASYMPTOTIC_BELOW {
        libm::log(0.5 * libm::erfc(-z * FRAC_1_SQRT_2))
    } else {
        // Φ(z) = φ(z)/|z| · (1 - 1/z² + 3/z⁴ - 15/z⁶ + 105/z⁸ - …)
        let w = 1.0 / (z * z);
        let series = 1.0 - w * (1.0 - w * (3.0 - w * (15.0 - w * 105.0)));
        log_gaussian_pdf(z) - libm::log(-z) + libm::log(series)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pdf_values() {
        assert_relative_eq!(gaussian_pdf(0.0), 0.398_942_280_401_432_7, max_relative = 1e-15);
        assert_relative_eq!(gaussian_pdf(1.0), 0.241_970_724_519_143_35, max_relative = 1e-14);
        assert_relative_eq!(gaussian_pdf(-2.0), 0.053_990_966_513_188_05, max_relative = 1e-14);
        assert_eq!(gaussian_pdf(-2.0), gaussian_pdf(2.0));
    }

    #[test]
    fn cdf_values() {
        assert_eq!(gaussian_cdf(0.0), 0.5);
        assert!((gaussian_cdf(8.0) - 1.0).abs() <= 1e-15);
        assert_relative_eq!(gaussian_cdf(-1.0), 0.158_655_253_931_457_05, max_relative = 1e-14);
    }

    #[test]
    fn log_cdf_against_high_precision() {
        // mpmath, 40 digits
        let cases = [
            (-10.0, -53.231_285_150_512_47),
            (-40.0, -804.608_442_013_753_8),
            (-5.0, -15.064_998_393_988_726),
            (3.0, -0.001_350_809_964_748_193_8),
        ];
        for (z, want) in cases {
            assert_relative_eq!(log_gaussian_cdf(z), want, max_relative = 1e-12);
        }
    }

    #[test]
    fn log_cdf_continuous_at_branch_points() {
        for z0 in [-1.0, LOG_CDF_ASYMPTOTIC_BELOW] {
            // slope of ln Φ is |z| + O(1/|z|) here, so a 2e-9 step moves it ~1e-7
            let below = log_gaussian_cdf(z0 - 1e-9);
            let above = log_gaussian_cdf(z0 + 1e-9);
            assert!((above - below).abs() < 1e-7, "z0 = {z0}: {below} vs {above}");
            assert!(above >= below);
        }
    }

    #[test]
    fn log_cdf_finite_deep_in_tail() {
        for z in [-37.0, -38.0, -100.0, -1e4] {
            assert!(log_gaussian_cdf(z).is_finite(), "z = {z}");
        }
    }

    proptest::proptest! {
        #[test]
        fn cdf_monotone(a in -40.0f64..40.0, d in 0.0f64..5.0) {
            proptest::prop_assert!(gaussian_cdf(a) <= gaussian_cdf(a + d));
            proptest::prop_assert!(log_gaussian_cdf(a) <= log_gaussian_cdf(a + d) + 1e-15);
        }
    }
}
