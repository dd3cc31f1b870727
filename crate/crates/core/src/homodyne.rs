//! Homodyne detection of a squeezed-coherent state `|α, λ⟩` after an unknown
//! phase shift `β`.
//!
//! The shift maps `|α, λ⟩ → |α e^{-iβ}, λ e^{-2iβ}⟩`, and the quadrature
//! `χ_φ = (a† e^{iφ} + a e^{-iφ})/√2` is then Gaussian with
//!
//! ```text
//! mean     = √2 |α| cos(θ − φ − β)
//! variance = ½ [e^{2r} sin²(φ + β − ϕ/2) + e^{−2r} cos²(φ + β − ϕ/2)]
//! ```
//!
//! Detectors are ideal (unit quantum efficiency).

use std::f64::consts::{PI, SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::bayes::{log_marginal_likelihood_alt, OutcomeRegime, PosteriorReport, PriorSpec};
use crate::error::{ensure, Result};
use crate::numerics::{gaussian_log_pdf, Moments};

/// Displaced squeezed vacuum `D(α) S(λ) |0⟩` with `α = |α| e^{iθ}`, `λ = r e^{iϕ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedCoherentState {
    pub alpha_mag: f64,
    /// θ, reduced to `[0, 2π)`.
    pub alpha_phase: f64,
    /// r
    pub squeeze_mag: f64,
    /// ϕ, reduced to `[0, 2π)`.
    pub squeeze_phase: f64,
}

impl SqueezedCoherentState {
    pub fn new(alpha_mag: f64, alpha_phase: f64, squeeze_mag: f64, squeeze_phase: f64) -> Result<Self> {
        ensure(alpha_mag.is_finite() && alpha_mag >= 0.0, || {
            format!("|alpha| = {alpha_mag} must be finite and >= 0")
        })?;
        ensure(squeeze_mag.is_finite() && squeeze_mag >= 0.0, || {
            format!("squeezing r = {squeeze_mag} must be finite and >= 0")
        })?;
        ensure(alpha_phase.is_finite() && squeeze_phase.is_finite(), || {
            "state phases must be finite".to_string()
        })?;
        Ok(SqueezedCoherentState {
            alpha_mag,
            alpha_phase: alpha_phase.rem_euclid(TAU),
            squeeze_mag,
            squeeze_phase: squeeze_phase.rem_euclid(TAU),
        })
    }

    /// Real amplitude, squeezing along the amplitude quadrature (`θ = ϕ = 0`).
    pub fn amplitude_squeezed(alpha_mag: f64, squeeze_mag: f64) -> Result<Self> {
        Self::new(alpha_mag, 0.0, squeeze_mag, 0.0)
    }
}

/// Measured quadrature angle φ and applied phase shift β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomodyneConfig {
    pub quadrature_phase: f64,
    pub shift: f64,
}

impl HomodyneConfig {
    pub fn new(quadrature_phase: f64, shift: f64) -> Result<Self> {
        ensure(quadrature_phase.is_finite() && shift.is_finite(), || {
            "homodyne phases must be finite".to_string()
        })?;
        Ok(HomodyneConfig {
            quadrature_phase,
            shift,
        })
    }
}

pub fn quadrature_moments(state: &SqueezedCoherentState, config: &HomodyneConfig) -> Moments {
    let phi = config.quadrature_phase;
    let beta = config.shift;
    let mean = SQRT_2 * state.alpha_mag * (state.alpha_phase - phi - beta).cos();
    let angle = phi + beta - 0.5 * state.squeeze_phase;
    let (s, c) = angle.sin_cos();
    let two_r = 2.0 * state.squeeze_mag;
    let variance = 0.5 * (two_r.exp() * s * s + (-two_r).exp() * c * c);
    Moments { mean, variance }
}

pub fn outcome_log_pdf(q: f64, state: &SqueezedCoherentState, config: &HomodyneConfig) -> f64 {
    let m = quadrature_moments(state, config);
    gaussian_log_pdf(q, m.mean, m.variance)
}

/// Gaussian density of the quadrature outcome `q`.
pub fn outcome_pdf(q: f64, state: &SqueezedCoherentState, config: &HomodyneConfig) -> f64 {
    outcome_log_pdf(q, state, config).exp()
}

/// Posterior of "no shift" (`β = prior.null_value`) for a measurement of the
/// `φ = 0` quadrature.
pub fn homodyne_posterior(
    q: f64,
    state: &SqueezedCoherentState,
    prior: &PriorSpec,
    tol: f64,
) -> Result<PosteriorReport> {
    homodyne_posterior_at(q, state, 0.0, prior, tol)
}

/// [`homodyne_posterior`] for an arbitrary measured quadrature.
///
/// The alternative marginal integrates the Gaussian with the shift-dependent
/// mean *and* variance over the prior's support.
pub fn homodyne_posterior_at(
    q: f64,
    state: &SqueezedCoherentState,
    quadrature_phase: f64,
    prior: &PriorSpec,
    tol: f64,
) -> Result<PosteriorReport> {
    ensure(q.is_finite(), || format!("outcome q = {q} must be finite"))?;
    prior.validate()?;
    let at = |beta: f64| HomodyneConfig {
        quadrature_phase,
        shift: beta,
    };
    let log_null = outcome_log_pdf(q, state, &at(prior.null_value));
    let log_alt = log_marginal_likelihood_alt(
        |beta| outcome_log_pdf(q, state, &at(beta)),
        prior,
        tol,
        &[prior.null_value],
    )?;
    Ok(PosteriorReport::from_log_likelihoods(
        log_null,
        log_alt,
        prior.null_weight,
        OutcomeRegime::Continuous,
    )?)
}

/// Phase interval over which a homodyne phase shift is assumed to range.
pub const SHIFT_INTERVAL: (f64, f64) = (-PI, PI);
