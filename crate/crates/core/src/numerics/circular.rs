use std::f64::consts::PI;

/// Number of images `K` kept on each side of the wrapped sum: `ceil(6σ/period) + 2`.
pub fn wrapped_normal_truncation(sigma: f64, period: f64) -> usize {
    (6.0 * sigma / period).ceil() as usize + 2
}

/// Wrapped normal density on a circle of circumference `period`:
/// `(2πσ²)^{-1/2} Σ_k exp(-(φ - center + k·period)² / 2σ²)`.
///
/// The offset is first reduced into `[-period/2, period/2)` so that the
/// truncated sum is centered on the dominant image.
pub fn wrapped_normal_pdf(phi: f64, center: f64, sigma: f64, period: f64) -> f64 {
    wrapped_normal_pdf_truncated(
        phi,
        center,
        sigma,
        period,
        wrapped_normal_truncation(sigma, period),
    )
}

/// [`wrapped_normal_pdf`] with an explicit number of images per side.
pub fn wrapped_normal_pdf_truncated(
    phi: f64,
    center: f64,
    sigma: f64,
    period: f64,
    images: usize,
) -> f64 {
    debug_assert!(sigma > 0.0 && period > 0.0);
    let mut offset = (phi - center).rem_euclid(period);
    if offset >= 0.5 * period {
        offset -= period;
    }
    let two_var = 2.0 * sigma * sigma;
    let k = images as i64;
    let sum: f64 = (-k..=k)
        .map(|j| {
            let z = offset + j as f64 * period;
            (-z * z / two_var).exp()
        })
        .sum();
    sum / (PI * two_var).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::adaptive_integrate;
    use approx::assert_relative_eq;

    #[test]
    fn normalized_on_one_period() {
        for &(sigma, center) in &[(0.3, PI / 2.0), (0.05, 0.4), (2.0, PI / 2.0), (1.0, 3.0)] {
            let r = adaptive_integrate(|p| wrapped_normal_pdf(p, center, sigma, PI), 0.0, PI, 1e-12)
                .unwrap();
            assert_relative_eq!(r.value, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn diffuse_limit_is_flat() {
        for phi in [0.0, 0.3, 1.0, PI / 2.0, 2.9, 7.0, -4.0] {
            assert_relative_eq!(wrapped_normal_pdf(phi, PI / 2.0, 10.0, PI), 1.0 / PI, epsilon = 1e-6);
        }
    }

    #[test]
    fn unimodal_on_one_period() {
        for sigma in [0.01, 0.1, 0.5, 1.0] {
            let c = 1.1;
            let peak = wrapped_normal_pdf(c, c, sigma, PI);
            assert!(peak > wrapped_normal_pdf(c + PI / 2.0, c, sigma, PI));
            assert!(peak > wrapped_normal_pdf(c - PI / 2.0, c, sigma, PI));
        }
    }

    #[test]
    fn truncation_is_converged() {
        let mut sigma = 0.01;
        while sigma <= 10.0 {
            let k = wrapped_normal_truncation(sigma, PI);
            for i in 0..=20 {
                let phi = i as f64 * PI / 20.0;
                let a = wrapped_normal_pdf_truncated(phi, PI / 2.0, sigma, PI, k);
                let b = wrapped_normal_pdf_truncated(phi, PI / 2.0, sigma, PI, k + 1);
                assert!((a - b).abs() < 1e-12, "sigma={sigma} phi={phi}: {a} vs {b}");
            }
            sigma *= 1.3;
        }
    }

    #[test]
    fn periodic() {
        let a = wrapped_normal_pdf(0.7, 1.5, 0.4, PI);
        assert_relative_eq!(a, wrapped_normal_pdf(0.7 + 3.0 * PI, 1.5, 0.4, PI), epsilon = 1e-12);
        assert_relative_eq!(a, wrapped_normal_pdf(0.7 - 2.0 * PI, 1.5, 0.4, PI), epsilon = 1e-12);
    }
}
