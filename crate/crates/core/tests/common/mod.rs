//! Brute-force reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's likelihood or quadrature code: the
//! Skellam pmf comes from a direct Poisson convolution and every marginal
//! likelihood from a midpoint Riemann sum.
#![allow(dead_code)]

use statrs::function::gamma::ln_gamma;

pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

pub fn log_poisson(k: i64, rate: f64) -> f64 {
    if k < 0 {
        return f64::NEG_INFINITY;
    }
    if rate == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    k as f64 * rate.ln() - rate - ln_gamma(k as f64 + 1.0)
}

/// `ln Σ_n Pois(n + d; μ₁) Pois(n; μ₂)`.
pub fn log_skellam_by_convolution(d: i64, mu1: f64, mu2: f64) -> f64 {
    let start = (-d).max(0);
    let stop = start + (mu1 + mu2 + 12.0 * (mu1 + mu2).sqrt() + 60.0) as i64 + d.abs();
    let terms: Vec<f64> = (start..=stop)
        .map(|n| log_poisson(n + d, mu1) + log_poisson(n, mu2))
        .collect();
    log_sum_exp(&terms)
}

pub fn log_coherent_pmf(d: i64, alpha: f64, eta: f64, phi: f64) -> f64 {
    let i = eta * alpha * alpha;
    let c = (0.5 * phi).cos();
    let s = (0.5 * phi).sin();
    log_skellam_by_convolution(d, i * c * c, i * s * s)
}

pub fn log_gaussian(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * ((x - mean).powi(2) / var + (2.0 * std::f64::consts::PI * var).ln())
}

/// `ln ∫ₐᵇ prior(φ) e^{log_lik(φ)} dφ` by the midpoint rule on `n` cells.
pub fn log_riemann<L: Fn(f64) -> f64, P: Fn(f64) -> f64>(log_lik: L, prior: P, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let terms: Vec<f64> = (0..n)
        .map(|k| {
            let phi = a + (k as f64 + 0.5) * h;
            log_lik(phi) + prior(phi).ln()
        })
        .collect();
    log_sum_exp(&terms) + h.ln()
}

pub fn posterior_from_logs(log_null: f64, log_alt: f64, z0: f64) -> f64 {
    1.0 / (1.0 + (1.0 - z0) / z0 * (log_alt - log_null).exp())
}

/// Amplitude-squeezed homodyne (`θ = ϕ = 0`, `φ = 0`) quadrature moments at shift β.
pub fn homodyne_moments(alpha: f64, r: f64, beta: f64) -> (f64, f64) {
    let mean = 2f64.sqrt() * alpha * beta.cos();
    let var = 0.5 * ((2.0 * r).exp() * beta.sin().powi(2) + (-2.0 * r).exp() * beta.cos().powi(2));
    (mean, var)
}

/// Homodyne `z̄₀` with a flat alternative on `[−π, π]`.
pub fn homodyne_posterior_riemann(q: f64, alpha: f64, r: f64, z0: f64, n: usize) -> f64 {
    let pi = std::f64::consts::PI;
    let lik = |b: f64| {
        let (m, v) = homodyne_moments(alpha, r, b);
        log_gaussian(q, m, v)
    };
    let log_alt = log_riemann(lik, |_| 1.0 / (2.0 * pi), -pi, pi, n);
    posterior_from_logs(lik(0.0), log_alt, z0)
}

/// Coherent-MZ `z̄₀` for an arbitrary alternative density on `[0, π]`.
pub fn mz_posterior_riemann<P: Fn(f64) -> f64>(
    d: i64,
    alpha: f64,
    eta: f64,
    phi0: f64,
    z0: f64,
    prior: P,
    n: usize,
) -> f64 {
    let log_alt = log_riemann(|p| log_coherent_pmf(d, alpha, eta, p), prior, 0.0, std::f64::consts::PI, n);
    posterior_from_logs(log_coherent_pmf(d, alpha, eta, phi0), log_alt, z0)
}

/// Wrapped normal density by direct image sum.
pub fn wrapped_normal(x: f64, center: f64, sigma: f64, period: f64) -> f64 {
    (-200..=200)
        .map(|k| log_gaussian(x + k as f64 * period, center, sigma * sigma).exp())
        .sum()
}
