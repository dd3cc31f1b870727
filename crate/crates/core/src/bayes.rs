//! Two-hypothesis Bayesian testing of a sharp null `φ = φ₀`.
//!
//! The null carries prior weight `z₀` concentrated on `φ₀`; the alternative
//! spreads `1 − z₀` over a density [`AltPrior`]. The posterior weight of the
//! null for an outcome `x` is
//!
//! ```text
//! z̄₀ = [1 + ((1 − z₀)/z₀) · p(x|H₁)/p(x|H₀)]⁻¹
//! ```
//!
//! and is always assembled from the log Bayes factor `ln p(x|H₁) − ln p(x|H₀)`,
//! since the likelihood ratio routinely spans hundreds of orders of magnitude.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{self, gaussian_log_pdf, wrapped_normal_pdf, NumericsError, Tolerance};
use crate::paradox::Classification;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BayesError {
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("invalid probability {name} = {value}: must lie in [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("invalid likelihood {name} = {value}: must be finite and non-negative")]
    InvalidLikelihood { name: &'static str, value: f64 },
    #[error("outcome has zero likelihood under both hypotheses")]
    Indeterminate,
    #[error("point-mass alternative has no marginal likelihood integral")]
    DegenerateAltPrior,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Density of the phase under the alternative hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AltPrior {
    /// Uniform on `[lo, hi]`, density `1/(hi − lo)`.
    Flat { lo: f64, hi: f64 },
    /// Wrapped normal with the given period, supported on the single period
    /// centered at `center`.
    WrappedNormal { center: f64, sigma: f64, period: f64 },
    PointMass { value: f64 },
}

impl AltPrior {
    fn validate(&self) -> Result<(), BayesError> {
        match *self {
            AltPrior::Flat { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(BayesError::InvalidPrior(format!(
                        "flat interval [{lo}, {hi}] must be finite and nonempty"
                    )));
                }
            }
            AltPrior::WrappedNormal { center, sigma, period } => {
                if !center.is_finite() {
                    return Err(BayesError::InvalidPrior(format!(
                        "wrapped normal center {center} must be finite"
                    )));
                }
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(BayesError::InvalidPrior(format!(
                        "wrapped normal sigma {sigma} must be positive"
                    )));
                }
                if !(period.is_finite() && period > 0.0) {
                    return Err(BayesError::InvalidPrior(format!(
                        "wrapped normal period {period} must be positive"
                    )));
                }
            }
            AltPrior::PointMass { value } => {
                if !value.is_finite() {
                    return Err(BayesError::InvalidPrior(format!(
                        "point mass at {value} must be finite"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Integration domain, or `None` for a point mass.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            AltPrior::Flat { lo, hi } => Some((lo, hi)),
            AltPrior::WrappedNormal { center, period, .. } => {
                Some((center - 0.5 * period, center + 0.5 * period))
            }
            AltPrior::PointMass { .. } => None,
        }
    }

    /// Density at `phi`. Zero outside the support; a point mass has no density.
    pub fn density(&self, phi: f64) -> f64 {
        match *self {
            AltPrior::Flat { lo, hi } => {
                if (lo..=hi).contains(&phi) {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            AltPrior::WrappedNormal { center, sigma, period } => {
                wrapped_normal_pdf(phi, center, sigma, period)
            }
            AltPrior::PointMass { .. } => f64::NAN,
        }
    }

    /// Points where the density has structure worth bracketing with panels.
    fn feature_points(&self) -> Vec<f64> {
        match *self {
            AltPrior::WrappedNormal { center, sigma, .. } => {
                let mut pts = vec![center];
                for k in [1.0, 3.0, 6.0] {
                    pts.push(center - k * sigma);
                    pts.push(center + k * sigma);
                }
                pts
            }
            _ => Vec::new(),
        }
    }
}

/// Prior over the two hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    /// `z₀`, prior probability of the null.
    pub null_weight: f64,
    /// Phase asserted by the null hypothesis.
    pub null_value: f64,
    pub alt: AltPrior,
}

impl PriorSpec {
    pub fn new(null_weight: f64, null_value: f64, alt: AltPrior) -> Result<Self, BayesError> {
        check_probability("z0", null_weight)?;
        if !null_value.is_finite() {
            return Err(BayesError::InvalidPrior(format!(
                "null value {null_value} must be finite"
            )));
        }
        alt.validate()?;
        Ok(PriorSpec {
            null_weight,
            null_value,
            alt,
        })
    }

    pub fn flat(null_weight: f64, null_value: f64, lo: f64, hi: f64) -> Result<Self, BayesError> {
        Self::new(null_weight, null_value, AltPrior::Flat { lo, hi })
    }

    pub fn wrapped_normal(
        null_weight: f64,
        null_value: f64,
        center: f64,
        sigma: f64,
        period: f64,
    ) -> Result<Self, BayesError> {
        Self::new(
            null_weight,
            null_value,
            AltPrior::WrappedNormal {
                center,
                sigma,
                period,
            },
        )
    }

    /// Re-runs the constructor checks, for values built by hand or deserialized.
    pub fn validate(&self) -> Result<(), BayesError> {
        Self::new(self.null_weight, self.null_value, self.alt).map(|_| ())
    }
}

/// Whether the outcome space is a lattice (photon-count differences) or continuous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeRegime {
    Continuous,
    Lattice,
}

/// Everything known about one outcome's posterior.
///
/// `pvalue` and `classification` are filled in by the frequentist comparison
/// in [`crate::paradox`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorReport {
    /// `z̄₀`
    pub posterior_null: f64,
    pub likelihood_null: f64,
    pub likelihood_alt: f64,
    pub log_likelihood_null: f64,
    pub log_likelihood_alt: f64,
    pub log_bayes_factor: f64,
    /// `likelihood_alt / likelihood_null`; may be `inf` when the null likelihood underflows.
    pub bayes_factor: f64,
    pub pvalue: Option<f64>,
    pub classification: Option<Classification>,
    pub regime: OutcomeRegime,
}

impl PosteriorReport {
    pub fn from_log_likelihoods(
        log_likelihood_null: f64,
        log_likelihood_alt: f64,
        null_weight: f64,
        regime: OutcomeRegime,
    ) -> Result<Self, BayesError> {
        let posterior_null =
            posterior_null_from_logs(log_likelihood_null, log_likelihood_alt, null_weight)?;
        let log_bayes_factor = log_bayes_factor(log_likelihood_null, log_likelihood_alt);
        Ok(PosteriorReport {
            posterior_null,
            likelihood_null: log_likelihood_null.exp(),
            likelihood_alt: log_likelihood_alt.exp(),
            log_likelihood_null,
            log_likelihood_alt,
            log_bayes_factor,
            bayes_factor: log_bayes_factor.exp(),
            pvalue: None,
            classification: None,
            regime,
        })
    }

    /// Posterior probability of the alternative, `1 − z̄₀`.
    pub fn posterior_alt(&self) -> f64 {
        1.0 - self.posterior_null
    }
}

fn check_probability(name: &'static str, value: f64) -> Result<(), BayesError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(BayesError::InvalidProbability { name, value })
    }
}

fn log_bayes_factor(log_null: f64, log_alt: f64) -> f64 {
    match (log_null == f64::NEG_INFINITY, log_alt == f64::NEG_INFINITY) {
        (true, true) => f64::NAN,
        (true, false) => f64::INFINITY,
        (false, true) => f64::NEG_INFINITY,
        (false, false) => log_alt - log_null,
    }
}

/// `z̄₀` from the log Bayes factor `ln(L_alt / L_null)`, via the logistic form.
pub fn posterior_from_log_bayes_factor(log_bf: f64, null_weight: f64) -> Result<f64, BayesError> {
    check_probability("z0", null_weight)?;
    if null_weight == 1.0 {
        return Ok(1.0);
    }
    if null_weight == 0.0 {
        return Ok(0.0);
    }
    if log_bf.is_nan() {
        return Err(BayesError::Indeterminate);
    }
    if log_bf == 0.0 {
        return Ok(null_weight);
    }
    // z̄₀ = 1 / (1 + e^s), s = ln((1 − z₀)/z₀) + ln BF
    let s = (1.0 - null_weight).ln() - null_weight.ln() + log_bf;
    Ok(if s > 0.0 {
        let e = (-s).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + s.exp())
    })
}

/// `z̄₀` from log-likelihoods of the outcome under each hypothesis.
pub fn posterior_null_from_logs(
    log_likelihood_null: f64,
    log_likelihood_alt: f64,
    null_weight: f64,
) -> Result<f64, BayesError> {
    for (name, v) in [
        ("log_likelihood_null", log_likelihood_null),
        ("log_likelihood_alt", log_likelihood_alt),
    ] {
        if v.is_nan() || v == f64::INFINITY {
            return Err(BayesError::InvalidLikelihood { name, value: v });
        }
    }
    posterior_from_log_bayes_factor(
        log_bayes_factor(log_likelihood_null, log_likelihood_alt),
        null_weight,
    )
}

/// Posterior probability of the null, `{1 + ((1−z₀)/z₀)·(L_alt/L_null)}⁻¹`.
///
/// Fails with [`BayesError::Indeterminate`] when both likelihoods vanish and
/// `z₀ ∈ (0, 1)`.
pub fn posterior_null(
    likelihood_null: f64,
    likelihood_alt: f64,
    null_weight: f64,
) -> Result<f64, BayesError> {
    for (name, v) in [
        ("likelihood_null", likelihood_null),
        ("likelihood_alt", likelihood_alt),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(BayesError::InvalidLikelihood { name, value: v });
        }
    }
    posterior_null_from_logs(likelihood_null.ln(), likelihood_alt.ln(), null_weight)
}

/// Log Bayes factor for a Gaussian outcome `x ~ N(φ, σ²)` with a normal
/// alternative prior `φ ~ N(φ₀, τ²)`.
pub fn gaussian_log_bayes_factor(x: f64, phi0: f64, sigma: f64, tau: f64) -> f64 {
    let s2 = sigma * sigma;
    let t2 = tau * tau;
    let dx = x - phi0;
    0.5 * (s2 / (s2 + t2)).ln() + t2 * dx * dx / (2.0 * s2 * (s2 + t2))
}

/// Closed-form `z̄₀` for a Gaussian outcome with a normal alternative prior:
///
/// `[1 + ((1−z₀)/z₀)·√(σ²/(σ²+τ²))·exp(τ²(x−φ₀)² / (2σ²(σ²+τ²)))]⁻¹`.
///
/// For any fixed `x` this tends to 1 as `τ → ∞` and equals `z₀` at `τ = 0`.
pub fn gaussian_closed_form_posterior(x: f64, phi0: f64, sigma: f64, tau: f64, z0: f64) -> f64 {
    debug_assert!(sigma > 0.0 && tau >= 0.0);
    let log_bf = gaussian_log_bayes_factor(x, phi0, sigma, tau);
    posterior_from_log_bayes_factor(log_bf, z0).unwrap_or(f64::NAN)
}

/// The same posterior as [`gaussian_closed_form_posterior`], but with the
/// alternative marginal likelihood integrated numerically over `φ₀ ± 10τ`.
pub fn gaussian_posterior_by_quadrature(
    x: f64,
    phi0: f64,
    sigma: f64,
    tau: f64,
    z0: f64,
    tol: f64,
) -> Result<f64, BayesError> {
    if tau == 0.0 {
        return posterior_from_log_bayes_factor(0.0, z0);
    }
    let s2 = sigma * sigma;
    let t2 = tau * tau;
    let log_null = gaussian_log_pdf(x, phi0, s2);
    let lo = phi0 - 10.0 * tau;
    let hi = phi0 + 10.0 * tau;
    let mut hints = vec![phi0 - tau, phi0, phi0 + tau];
    for k in [1.0, 10.0] {
        hints.push(x - k * sigma);
        hints.push(x + k * sigma);
    }
    let log_alt = log_integral(
        |phi| gaussian_log_pdf(x, phi, s2) + gaussian_log_pdf(phi, phi0, t2),
        lo,
        hi,
        &hints,
        tol,
    )?;
    posterior_null_from_logs(log_null, log_alt, z0)
}

/// `p(x | H₁) = ∫ π₁(φ)·p(x|φ) dφ` over the support of the alternative prior.
///
/// `model_likelihood` is the likelihood of the fixed outcome as a function of phase.
pub fn marginal_likelihood_alt<F: Fn(f64) -> f64>(
    model_likelihood: F,
    prior: &PriorSpec,
    tol: f64,
) -> Result<f64, BayesError> {
    log_marginal_likelihood_alt(|phi| model_likelihood(phi).ln(), prior, tol, &[])
        .map(f64::exp)
}

/// Log-space version of [`marginal_likelihood_alt`].
///
/// `hints` are phases near which the likelihood is known to peak; each gets
/// bracketing panels in the initial partition.
pub fn log_marginal_likelihood_alt<F: Fn(f64) -> f64>(
    log_model_likelihood: F,
    prior: &PriorSpec,
    tol: f64,
    hints: &[f64],
) -> Result<f64, BayesError> {
    let (lo, hi) = prior.alt.support().ok_or(BayesError::DegenerateAltPrior)?;
    let mut points = prior.alt.feature_points();
    points.extend_from_slice(hints);
    let alt = prior.alt;
    log_integral(
        |phi| log_model_likelihood(phi) + alt.density(phi).ln(),
        lo,
        hi,
        &points,
        tol,
    )
}

const SHIFT_GRID: usize = 256;

/// `ln ∫_lo^hi exp(log_f(φ)) dφ` to relative tolerance `tol`.
///
/// The integrand is shifted by its maximum over a coarse grid so that the
/// quadrature works on values of order one.
pub(crate) fn log_integral<F: Fn(f64) -> f64>(
    log_f: F,
    lo: f64,
    hi: f64,
    hints: &[f64],
    tol: f64,
) -> Result<f64, BayesError> {
    let step = (hi - lo) / SHIFT_GRID as f64;
    let mut shift = f64::NEG_INFINITY;
    let mut argmax = 0.5 * (lo + hi);
    let probe = (1..SHIFT_GRID)
        .map(|i| lo + i as f64 * step)
        .chain(hints.iter().copied().filter(|&h| h > lo && h < hi));
    for phi in probe {
        let v = log_f(phi);
        if v > shift {
            shift = v;
            argmax = phi;
        }
    }
    if !shift.is_finite() {
        shift = 0.0;
    }

    let mut breaks = vec![lo, hi, argmax - step, argmax + step];
    breaks.extend_from_slice(hints);
    breaks.retain(|&b| b >= lo && b <= hi);
    breaks.sort_by(f64::total_cmp);
    let min_gap = 1e-9 * (hi - lo);
    breaks.dedup_by(|b, a| *b - *a < min_gap);
    if let Some(last) = breaks.last_mut() {
        *last = hi;
    }

    let result = numerics::integrate(
        |phi| (log_f(phi) - shift).exp(),
        &breaks,
        Tolerance::relative(tol),
        numerics::MAX_EVALUATIONS,
    )?;
    Ok(result.value.ln() + shift)
}


#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn posterior_null_examples() {
        assert_eq!(posterior_null(0.3, 0.8, 1.0).unwrap(), 1.0);
        assert_eq!(posterior_null(0.0, 0.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(posterior_null(0.4, 0.4, 0.5).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(posterior_null(0.1, 0.9, 0.9).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn posterior_null_edge_cases() {
        assert_eq!(posterior_null(0.0, 0.0, 0.5), Err(BayesError::Indeterminate));
        assert_eq!(posterior_null(0.0, 0.2, 0.5).unwrap(), 0.0);
        assert_eq!(posterior_null(0.2, 0.0, 0.5).unwrap(), 1.0);
        assert_eq!(posterior_null(0.2, 0.7, 0.0).unwrap(), 0.0);
        assert!(matches!(
            posterior_null(-1.0, 0.2, 0.5),
            Err(BayesError::InvalidLikelihood { .. })
        ));
        assert!(matches!(
            posterior_null(0.1, 0.2, 1.2),
            Err(BayesError::InvalidProbability { .. })
        ));
    }

    #[test]
    fn log_space_survives_underflow() {
        // Both likelihoods far below f64::MIN_POSITIVE.
        let z = posterior_null_from_logs(-1000.0, -1000.0 + 2f64.ln(), 0.5).unwrap();
        assert_relative_eq!(z, 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        assert!(gaussian_closed_form_posterior(3.0, 0.0, 1.0, 1e8, 0.5) > 1.0 - 1e-6);
        assert_eq!(gaussian_closed_form_posterior(3.0, 0.0, 1.0, 0.0, 0.37), 0.37);
        assert!((gaussian_closed_form_posterior(2.0, 0.0, 1.0, 1.0, 0.5) - 0.3422).abs() < 1e-4);
    }

    #[test]
    fn closed_form_matches_quadrature_example() {
        let numeric = gaussian_posterior_by_quadrature(2.0, 0.0, 1.0, 1.0, 0.5, 1e-10).unwrap();
        assert!((numeric - 0.3422).abs() < 1e-4);
        assert_relative_eq!(
            numeric,
            gaussian_closed_form_posterior(2.0, 0.0, 1.0, 1.0, 0.5),
            epsilon = 1e-9
        );
    }

    #[test]
    fn paradox_bracketing_in_tau() {
        let x = 2.5;
        let z0 = 0.3;
        assert!(gaussian_closed_form_posterior(x, 0.0, 1.0, 1e-6, z0) - z0 < 1e-9);
        assert!(gaussian_closed_form_posterior(x, 0.0, 1.0, 1e12, z0) > 0.9999);
    }

    #[test]
    fn marginal_of_constant_model_is_constant() {
        let flat = PriorSpec::flat(0.9, PI / 2.0, 0.0, PI).unwrap();
        let m = marginal_likelihood_alt(|_| 0.37, &flat, 1e-10).unwrap();
        assert_relative_eq!(m, 0.37, epsilon = 1e-10);
        let wn = PriorSpec::wrapped_normal(0.9, PI / 2.0, PI / 2.0, 0.5, PI).unwrap();
        let m = marginal_likelihood_alt(|_| 0.37, &wn, 1e-10).unwrap();
        assert_relative_eq!(m, 0.37, epsilon = 1e-9);
        let narrow = PriorSpec::wrapped_normal(0.9, PI / 2.0, PI / 2.0, 0.001, PI).unwrap();
        let m = marginal_likelihood_alt(|_| 0.37, &narrow, 1e-10).unwrap();
        assert_relative_eq!(m, 0.37, epsilon = 1e-9);
    }

    #[test]
    fn point_mass_rejected_by_marginal() {
        let p = PriorSpec::new(0.9, 0.0, AltPrior::PointMass { value: 0.0 }).unwrap();
        assert_eq!(
            marginal_likelihood_alt(|_| 1.0, &p, 1e-8),
            Err(BayesError::DegenerateAltPrior)
        );
    }

    #[test]
    fn invalid_priors_rejected() {
        assert!(PriorSpec::flat(1.1, 0.0, 0.0, 1.0).is_err());
        assert!(PriorSpec::flat(0.5, 0.0, 1.0, 1.0).is_err());
        assert!(PriorSpec::wrapped_normal(0.5, 0.0, 0.0, 0.0, PI).is_err());
        assert!(PriorSpec::wrapped_normal(0.5, 0.0, 0.0, 1.0, -1.0).is_err());
        assert!(PriorSpec::new(0.5, f64::NAN, AltPrior::Flat { lo: 0.0, hi: 1.0 }).is_err());
    }

    #[test]
    fn complement_is_exact() {
        let r = PosteriorReport::from_log_likelihoods(-3.2, -1.7, 0.8, OutcomeRegime::Continuous)
            .unwrap();
        assert_eq!(r.posterior_alt(), 1.0 - r.posterior_null);
        assert_relative_eq!(r.posterior_alt() + r.posterior_null, 1.0, epsilon = 0.0);
    }

    proptest! {
        #[test]
        fn report_satisfies_bayes_identity(
            ln_null in -50.0f64..5.0,
            ln_alt in -50.0f64..5.0,
            z0 in 0.01f64..0.99,
        ) {
            let r = PosteriorReport::from_log_likelihoods(ln_null, ln_alt, z0, OutcomeRegime::Continuous).unwrap();
            let direct = 1.0 / (1.0 + (1.0 - z0) / z0 * r.bayes_factor);
            prop_assert!((r.posterior_null - direct).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&r.posterior_null));
        }

        #[test]
        fn posterior_decreasing_in_bayes_factor(
            a in -30.0f64..30.0,
            gap in 1e-3f64..10.0,
            z0 in 0.01f64..0.99,
        ) {
            let lo = posterior_from_log_bayes_factor(a, z0).unwrap();
            let hi = posterior_from_log_bayes_factor(a + gap, z0).unwrap();
            prop_assert!(hi < lo);
        }

        #[test]
        fn closed_form_matches_quadrature(
            sigma in 0.1f64..10.0,
            tau in 0.1f64..10.0,
            t in -6.0f64..6.0,
            z0 in 0.05f64..0.95,
        ) {
            let x = 0.3 + t * sigma;
            let closed = gaussian_closed_form_posterior(x, 0.3, sigma, tau, z0);
            let numeric = gaussian_posterior_by_quadrature(x, 0.3, sigma, tau, z0, 1e-11).unwrap();
            prop_assert!((closed - numeric).abs() < 1e-7, "{} vs {}", closed, numeric);
        }
    }
}
