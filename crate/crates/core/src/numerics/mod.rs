//! Numerical building blocks shared by every measurement model.
//!
//! Likelihoods in the interferometric models routinely involve products
//! like `e^{-70} · I_d(70)`, so everything here is either evaluated in log
//! space or returns logarithms directly.

mod bessel;
mod circular;
mod quadrature;

pub use bessel::log_bessel_i;
pub use circular::{
    wrapped_normal_pdf, wrapped_normal_pdf_truncated, wrapped_normal_truncation,
};
pub use quadrature::{
    adaptive_integrate, integrate, QuadratureResult, Tolerance, MAX_EVALUATIONS,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("quadrature did not converge after {evaluations} evaluations (error estimate {error_estimate:e}, value {value:e})")]
    NonConvergence {
        evaluations: usize,
        error_estimate: f64,
        value: f64,
    },
    #[error("integrand is not finite at x = {at}")]
    NonFinite { at: f64 },
    #[error("invalid integration interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
}

/// Mean and variance of an outcome distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// A probability stored as its natural logarithm. `-inf` is probability zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogProb(f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    pub fn new(value: f64) -> Self {
        LogProb(value)
    }

    pub fn from_prob(p: f64) -> Self {
        LogProb(p.ln())
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn prob(self) -> f64 {
        self.0.exp()
    }

    /// `ln(e^a + e^b)`.
    pub fn ln_add(self, other: LogProb) -> LogProb {
        LogProb(ln_add_exp(self.0, other.0))
    }
}

impl From<LogProb> for f64 {
    fn from(p: LogProb) -> f64 {
        p.0
    }
}

/// `ln(e^a + e^b)` without overflow or underflow.
#[inline]
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if hi == f64::INFINITY {
        return f64::INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ exp(tᵢ)`, shifted by the maximum term.
///
/// An empty slice is the empty sum and yields `-inf`.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    let sum: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
    max + sum.ln()
}

/// Density of `N(mean, variance)` at `x`.
#[inline]
pub fn gaussian_pdf(x: f64, mean: f64, variance: f64) -> f64 {
    gaussian_log_pdf(x, mean, variance).exp()
}

#[inline]
pub fn gaussian_log_pdf(x: f64, mean: f64, variance: f64) -> f64 {
    let z = x - mean;
    -0.5 * (z * z / variance + (2.0 * std::f64::consts::PI * variance).ln())
}

/// `ln k!` for a non-negative integer.
#[inline]
pub fn ln_factorial(k: u64) -> f64 {
    statrs::function::factorial::ln_factorial(k)
}

/// Log pmf of a Poisson variate with the given rate. Rate zero is a point mass at 0.
pub fn poisson_log_pmf(k: i64, rate: f64) -> f64 {
    if k < 0 {
        return f64::NEG_INFINITY;
    }
    if rate == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    k as f64 * rate.ln() - rate - ln_factorial(k as u64)
}
