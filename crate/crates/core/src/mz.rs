//! Mach-Zehnder interferometer read out through the difference photocurrent
//! `D(φ) = η (f†f − e†e)`.
//!
//! In terms of the input modes `a` (signal) and `b` (the second port),
//!
//! ```text
//! D(φ) = η [ (a†a − b†b) cos φ + i (b†a − a†b) sin φ ]
//! ```
//!
//! Two inputs are modelled:
//!
//! * **Coherent** `|α⟩|0⟩`: the two output counts are independent Poisson
//!   variates with rates `μ₁ = η|α|² cos²(φ/2)` and `μ₂ = η|α|² sin²(φ/2)`, so the
//!   difference `d` is Skellam distributed with mean `η|α|² cos φ` and
//!   variance `η|α|²`.
//! * **Squeezed** `|α⟩|λ⟩`: a squeezed vacuum with `sinh² r` photons in port
//!   `b`. The exact count law is not used; `d` is treated as a continuous
//!   Gaussian with the exact first two moments.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bayes::{log_marginal_likelihood_alt, OutcomeRegime, PosteriorReport, PriorSpec};
use crate::error::{ensure, Error, Result};
use crate::numerics::{gaussian_log_pdf, log_bessel_i, poisson_log_pmf, LogProb, Moments};

/// Step of the central difference used for the squeezed-mean slope.
pub const SLOPE_STEP: f64 = 1e-5;
const SLOPE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MzInput {
    Coherent {
        alpha_mag: f64,
    },
    /// Coherent signal plus squeezed vacuum `λ = r e^{iϕ}` in the second port.
    ///
    /// The variance formula assumes the optimal squeezing phase `ϕ = π`;
    /// `squeeze_phase` is carried for completeness but does not enter it.
    Squeezed {
        alpha_mag: f64,
        squeeze_mag: f64,
        squeeze_phase: f64,
    },
}

/// Which prefactor multiplies the detector-loss term of the squeezed variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceVariant {
    /// `½ η (1 − η)`, as published.
    #[default]
    AsPrinted,
    /// `η (1 − η)`, which reduces to the coherent variance `η|α|²` at `r = 0`.
    Consistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MzConfig {
    pub input: MzInput,
    /// Detector quantum efficiency η ∈ (0, 1].
    pub efficiency: f64,
    /// Bias phase φ₀.
    pub working_point: f64,
    #[serde(default)]
    pub variance_variant: VarianceVariant,
}

impl MzConfig {
    pub fn new(input: MzInput, efficiency: f64, working_point: f64) -> Result<Self> {
        let cfg = MzConfig {
            input,
            efficiency,
            working_point,
            variance_variant: VarianceVariant::AsPrinted,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn coherent(alpha_mag: f64, efficiency: f64, working_point: f64) -> Result<Self> {
        Self::new(MzInput::Coherent { alpha_mag }, efficiency, working_point)
    }

    pub fn squeezed(
        alpha_mag: f64,
        squeeze_mag: f64,
        squeeze_phase: f64,
        efficiency: f64,
        working_point: f64,
    ) -> Result<Self> {
        Self::new(
            MzInput::Squeezed {
                alpha_mag,
                squeeze_mag,
                squeeze_phase,
            },
            efficiency,
            working_point,
        )
    }

    pub fn with_variant(mut self, variant: VarianceVariant) -> Self {
        self.variance_variant = variant;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.efficiency > 0.0 && self.efficiency <= 1.0, || {
            format!("efficiency eta = {} must lie in (0, 1]", self.efficiency)
        })?;
        ensure(self.working_point.is_finite(), || {
            format!("working point {} must be finite", self.working_point)
        })?;
        let alpha = self.alpha_mag();
        ensure(alpha.is_finite() && alpha >= 0.0, || {
            format!("|alpha| = {alpha} must be finite and >= 0")
        })?;
        if let MzInput::Squeezed {
            squeeze_mag,
            squeeze_phase,
            ..
        } = self.input
        {
            ensure(squeeze_mag.is_finite() && squeeze_mag >= 0.0, || {
                format!("squeezing r = {squeeze_mag} must be finite and >= 0")
            })?;
            ensure(squeeze_phase.is_finite(), || {
                format!("squeeze phase {squeeze_phase} must be finite")
            })?;
        }
        Ok(())
    }

    pub fn alpha_mag(&self) -> f64 {
        match self.input {
            MzInput::Coherent { alpha_mag } | MzInput::Squeezed { alpha_mag, .. } => alpha_mag,
        }
    }

    pub fn squeeze_mag(&self) -> f64 {
        match self.input {
            MzInput::Coherent { .. } => 0.0,
            MzInput::Squeezed { squeeze_mag, .. } => squeeze_mag,
        }
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self.input, MzInput::Coherent { .. })
    }

    pub fn regime(&self) -> OutcomeRegime {
        if self.is_lattice() {
            OutcomeRegime::Lattice
        } else {
            OutcomeRegime::Continuous
        }
    }
}

/// Poisson rates of the two output detectors for a coherent input.
pub fn coherent_rates(alpha_mag: f64, eta: f64, phi: f64) -> (f64, f64) {
    let intensity = eta * alpha_mag * alpha_mag;
    let (s, c) = (0.5 * phi).sin_cos();
    (intensity * c * c, intensity * s * s)
}

/// Log pmf of the photocurrent difference `d` for coherent input:
///
/// `p_φ(d) = e^{−η|α|²} ((1+cos φ)/(1−cos φ))^{d/2} I_|d|(η|α|² sin φ)`.
///
/// Evaluated through the two-Poisson rates, which turn the removable
/// singularities at `φ ∈ {0, π}` into plain Poisson laws on `±d`.
pub fn coherent_log_pmf(d: i64, alpha_mag: f64, eta: f64, phi: f64) -> LogProb {
    let (mu1, mu2) = coherent_rates(alpha_mag, eta, phi);
    LogProb::new(skellam_log_pmf(d, mu1, mu2))
}

/// Log pmf of `N₁ − N₂` with `N₁ ~ Poisson(mu1)`, `N₂ ~ Poisson(mu2)`.
pub fn skellam_log_pmf(d: i64, mu1: f64, mu2: f64) -> f64 {
    if mu2 == 0.0 {
        return poisson_log_pmf(d, mu1);
    }
    if mu1 == 0.0 {
        return poisson_log_pmf(-d, mu2);
    }
    let order = d.unsigned_abs() as u32;
    let arg = 2.0 * (mu1 * mu2).sqrt();
    -(mu1 + mu2) + 0.5 * d as f64 * (mu1.ln() - mu2.ln()) + log_bessel_i(order, arg)
}

/// Mean `η|α|² cos φ` and variance `η|α|²` of the coherent-input difference.
pub fn coherent_moments(alpha_mag: f64, eta: f64, phi: f64) -> Moments {
    let intensity = eta * alpha_mag * alpha_mag;
    Moments {
        mean: intensity * phi.cos(),
        variance: intensity,
    }
}

/// First two moments of the difference photocurrent for squeezed input at phase `phi`.
///
/// For a coherent `config` this evaluates the same formulas with `r = 0`.
pub fn squeezed_moments(config: &MzConfig, phi: f64) -> Moments {
    squeezed_moments_with(
        config.alpha_mag(),
        config.squeeze_mag(),
        config.efficiency,
        phi,
        config.variance_variant,
    )
}

/// Squeezed-input moments with `|α|²` read for every `α²`:
///
/// ```text
/// mean = η cos φ (|α|² − sinh² r)
/// var  = k(η) (|α|² + sinh² r)
///        + η² { |α|² + 2 sinh² r cosh² r cos² φ
///               + sin² φ [sinh² r (1 + 2|α|²) − 2|α|² sinh r cosh r] }
/// ```
///
/// with `k(η) = ½η(1−η)` as printed or `η(1−η)` for the consistent variant.
pub fn squeezed_moments_with(
    alpha_mag: f64,
    squeeze_mag: f64,
    eta: f64,
    phi: f64,
    variant: VarianceVariant,
) -> Moments {
    let a2 = alpha_mag * alpha_mag;
    let sh = squeeze_mag.sinh();
    let ch = squeeze_mag.cosh();
    let sh2 = sh * sh;
    let (s, c) = phi.sin_cos();
    let loss = match variant {
        VarianceVariant::AsPrinted => 0.5 * eta * (1.0 - eta),
        VarianceVariant::Consistent => eta * (1.0 - eta),
    };
    let bracket = a2 + 2.0 * sh2 * ch * ch * c * c + s * s * (sh2 * (1.0 + 2.0 * a2) - 2.0 * a2 * sh * ch);
    Moments {
        mean: eta * c * (a2 - sh2),
        variance: loss * (a2 + sh2) + eta * eta * bracket,
    }
}

pub fn squeezed_outcome_log_pdf(d: f64, config: &MzConfig, phi: f64) -> f64 {
    let m = squeezed_moments(config, phi);
    gaussian_log_pdf(d, m.mean, m.variance)
}

/// Gaussian density of the squeezed-input difference photocurrent.
pub fn squeezed_outcome_pdf(d: f64, config: &MzConfig, phi: f64) -> f64 {
    squeezed_outcome_log_pdf(d, config, phi).exp()
}

/// Moments of the outcome distribution at phase `phi` for either input.
pub fn outcome_moments(config: &MzConfig, phi: f64) -> Moments {
    match config.input {
        MzInput::Coherent { alpha_mag } => coherent_moments(alpha_mag, config.efficiency, phi),
        MzInput::Squeezed { .. } => squeezed_moments(config, phi),
    }
}

/// Log likelihood of outcome `d` at phase `phi`. Coherent outcomes are
/// rounded to the lattice; callers validate integrality first.
pub fn outcome_log_likelihood(config: &MzConfig, d: f64, phi: f64) -> f64 {
    match config.input {
        MzInput::Coherent { alpha_mag } => {
            coherent_log_pmf(d.round() as i64, alpha_mag, config.efficiency, phi).ln()
        }
        MzInput::Squeezed { .. } => squeezed_outcome_log_pdf(d, config, phi),
    }
}

/// Linear-error-propagation phase sensitivity `√Var(D) / |∂⟨D⟩/∂φ|` at `phi0`.
pub fn sensitivity(config: &MzConfig, phi0: f64) -> Result<f64> {
    match config.input {
        MzInput::Coherent { alpha_mag } => {
            let slope = config.efficiency.sqrt() * alpha_mag * phi0.sin().abs();
            if phi0.sin().abs() < SLOPE_FLOOR || slope == 0.0 {
                return Err(Error::DivergentSensitivity { phi0 });
            }
            Ok(1.0 / slope)
        }
        MzInput::Squeezed { .. } => {
            let mean = |phi: f64| squeezed_moments(config, phi).mean;
            let slope = (mean(phi0 + SLOPE_STEP) - mean(phi0 - SLOPE_STEP)) / (2.0 * SLOPE_STEP);
            if slope.abs() < SLOPE_FLOOR {
                return Err(Error::DivergentSensitivity { phi0 });
            }
            Ok(squeezed_moments(config, phi0).std_dev() / slope.abs())
        }
    }
}

pub(crate) fn check_outcome(config: &MzConfig, d: f64) -> Result<()> {
    if !d.is_finite() {
        return Err(Error::InvalidOutcome {
            outcome: d,
            reason: "outcome must be finite",
        });
    }
    if config.is_lattice() && d.fract() != 0.0 {
        return Err(Error::InvalidOutcome {
            outcome: d,
            reason: "coherent-input outcomes are integer photocount differences",
        });
    }
    Ok(())
}

/// Posterior of the null `φ = prior.null_value` given the difference photocurrent `d`.
///
/// The alternative marginal integrates the outcome law over the prior's
/// support, with the phase-dependent variance inside the integral for the
/// squeezed model.
pub fn mz_posterior(
    d: f64,
    config: &MzConfig,
    prior: &PriorSpec,
    tol: f64,
) -> Result<PosteriorReport> {
    config.validate()?;
    prior.validate()?;
    check_outcome(config, d)?;
    let log_null = outcome_log_likelihood(config, d, prior.null_value);
    let log_alt = log_marginal_likelihood_alt(
        |phi| outcome_log_likelihood(config, d, phi),
        prior,
        tol,
        &[prior.null_value],
    )?;
    Ok(PosteriorReport::from_log_likelihoods(
        log_null,
        log_alt,
        prior.null_weight,
        config.regime(),
    )?)
}

/// Phase interval over which interferometric phase shifts are assumed to range.
pub const PHASE_INTERVAL: (f64, f64) = (0.0, PI);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{adaptive_integrate, log_sum_exp};
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    /// ln P(N₁ − N₂ = d) by direct convolution of the two Poisson laws.
    fn convolution_oracle(d: i64, mu1: f64, mu2: f64) -> f64 {
        let start = (-d).max(0);
        let terms: Vec<f64> = (start..start + 400)
            .map(|n2| poisson_log_pmf(n2 + d, mu1) + poisson_log_pmf(n2, mu2))
            .collect();
        log_sum_exp(&terms)
    }

    #[test]
    fn central_value_matches_poisson_convolution() {
        // η|α|² = 1, φ = π/2: two Poisson(½) variates
        let got = coherent_log_pmf(0, 1.0, 1.0, FRAC_PI_2).prob();
        let mut conv = 0.0;
        let mut p = (-0.5f64).exp();
        for n in 0..40 {
            if n > 0 {
                p *= 0.5 / n as f64;
            }
            conv += p * p;
        }
        assert_relative_eq!(got, conv, epsilon = 1e-14);
        assert!((got - 0.46576).abs() < 1e-5);
        assert_relative_eq!(got, (-1.0 + log_bessel_i(0, 1.0)).exp(), epsilon = 1e-14);
    }

    #[test]
    fn symmetric_at_quadrature_point() {
        for d in 0..40 {
            let a = coherent_log_pmf(d, 10.0, 0.7, FRAC_PI_2).ln();
            let b = coherent_log_pmf(-d, 10.0, 0.7, FRAC_PI_2).ln();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn normalized_and_centered() {
        let sd = 70f64.sqrt();
        let span = (10.0 * sd).ceil() as i64;
        let total: f64 = (-span..=span)
            .map(|d| coherent_log_pmf(d, 10.0, 0.7, FRAC_PI_2).prob())
            .sum();
        assert!((total - 1.0).abs() < 1e-10);

        let phi = PI / 3.0;
        let mean: f64 = (-150..=150)
            .map(|d| d as f64 * coherent_log_pmf(d, 10.0, 0.7, phi).prob())
            .sum();
        assert!((mean - 70.0 * phi.cos()).abs() < 1e-8);
    }

    #[test]
    fn closed_form_matches_convolution_oracle() {
        let phis = [0.1, PI / 4.0, FRAC_PI_2, 3.0, PI - 0.1];
        for &intensity in &[1.0f64, 10.0, 70.0] {
            for &phi in &phis {
                let (mu1, mu2) = coherent_rates(intensity.sqrt(), 1.0, phi);
                for d in -60..=60 {
                    let got = coherent_log_pmf(d, intensity.sqrt(), 1.0, phi).ln();
                    let want = convolution_oracle(d, mu1, mu2);
                    if want < -700.0 {
                        continue; // below f64 range as a probability
                    }
                    let rel = (got - want).exp_m1().abs();
                    assert!(rel < 1e-10, "I={intensity} phi={phi} d={d}: rel {rel}");
                }
            }
        }
    }

    #[test]
    fn endpoints_reduce_to_poisson() {
        for d in -5..30 {
            let at0 = coherent_log_pmf(d, 5.0, 0.8, 0.0).ln();
            let atpi = coherent_log_pmf(-d, 5.0, 0.8, PI).ln();
            let pois = poisson_log_pmf(d, 20.0);
            assert!(at0 == pois || (at0 - pois).abs() < 1e-12);
            if d >= 0 {
                assert!((atpi - pois).abs() < 1e-9);
            } else {
                // cos²(π/2) leaves a ~1e-32 rate behind, so the wrong side is negligible rather than empty
                assert!(atpi < -60.0 * d.unsigned_abs() as f64);
            }
        }
        // approaching the endpoint from inside is continuous
        let near = coherent_log_pmf(7, 5.0, 0.8, 1e-7).ln();
        assert!((near - poisson_log_pmf(7, 20.0)).abs() < 1e-8);
    }

    #[test]
    fn coherent_moment_examples() {
        let m = coherent_moments(10.0, 0.7, FRAC_PI_2);
        assert!(m.mean.abs() < 1e-12);
        assert_relative_eq!(m.variance, 70.0, epsilon = 1e-12);
        assert_relative_eq!(coherent_moments(10.0, 0.7, 0.0).mean, 70.0, epsilon = 1e-12);
        let m = coherent_moments(1.0, 1.0, PI / 3.0);
        assert_relative_eq!(m.mean, 0.5, epsilon = 1e-15);
        assert_eq!(m.variance, 1.0);
    }

    #[test]
    fn squeezed_moment_examples() {
        let cfg = MzConfig::squeezed(10.0, 1.0, PI, 1.0, FRAC_PI_2).unwrap();
        let m = squeezed_moments(&cfg, FRAC_PI_2);
        assert!(m.mean.abs() < 1e-12);
        assert!((m.variance - 14.92).abs() < 0.01);
        // η = 1 collapses to |α|² e^{−2r} + sinh² r
        let oracle = 100.0 * (-2.0f64).exp() + 1f64.sinh().powi(2);
        assert_relative_eq!(m.variance, oracle, epsilon = 1e-12);

        let plain = MzConfig::squeezed(10.0, 0.0, PI, 1.0, FRAC_PI_2).unwrap();
        assert_relative_eq!(squeezed_moments(&plain, FRAC_PI_2).variance, 100.0, epsilon = 1e-12);
        for phi in [0.0, 0.4, 2.0] {
            let cfg = MzConfig::squeezed(4.0, 0.3, PI, 0.6, FRAC_PI_2).unwrap();
            assert!(squeezed_moments(&cfg, FRAC_PI_2 + phi).mean.is_finite());
        }
    }

    #[test]
    fn squeezed_r0_mean_matches_coherent() {
        for &eta in &[0.3, 0.7, 1.0] {
            let cfg = MzConfig::squeezed(6.0, 0.0, PI, eta, FRAC_PI_2).unwrap();
            for phi in [0.0, 0.5, 1.7, 3.0] {
                assert_relative_eq!(
                    squeezed_moments(&cfg, phi).mean,
                    coherent_moments(6.0, eta, phi).mean,
                    epsilon = 1e-12
                );
            }
        }
        // the consistent variant also restores the coherent variance
        let cfg = MzConfig::squeezed(6.0, 0.0, PI, 0.4, FRAC_PI_2)
            .unwrap()
            .with_variant(VarianceVariant::Consistent);
        for phi in [0.0, 0.5, 1.7] {
            assert_relative_eq!(squeezed_moments(&cfg, phi).variance, 0.4 * 36.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn squeezed_pdf_shape() {
        let cfg = MzConfig::squeezed(10.0, 1.0, PI, 0.8, FRAC_PI_2).unwrap();
        let phi = 1.2;
        let m = squeezed_moments(&cfg, phi);
        assert_relative_eq!(
            squeezed_outcome_pdf(m.mean, &cfg, phi),
            1.0 / (2.0 * PI * m.variance).sqrt(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            squeezed_outcome_pdf(m.mean + 2.5, &cfg, phi),
            squeezed_outcome_pdf(m.mean - 2.5, &cfg, phi),
            epsilon = 1e-12
        );
        let sd = m.std_dev();
        let mass = adaptive_integrate(
            |d| squeezed_outcome_pdf(d, &cfg, phi),
            m.mean - 8.0 * sd,
            m.mean + 8.0 * sd,
            1e-12,
        )
        .unwrap();
        assert!((mass.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn coherent_sensitivity() {
        let cfg = MzConfig::coherent(10.0, 1.0, FRAC_PI_2).unwrap();
        assert_relative_eq!(sensitivity(&cfg, FRAC_PI_2).unwrap(), 0.1, epsilon = 1e-14);

        let best = (1..1000)
            .map(|i| i as f64 * PI / 1000.0)
            .min_by(|a, b| {
                sensitivity(&cfg, *a).unwrap().total_cmp(&sensitivity(&cfg, *b).unwrap())
            })
            .unwrap();
        assert!((best - FRAC_PI_2).abs() < PI / 1000.0);

        let lossy = MzConfig::coherent(10.0, 0.49, FRAC_PI_2).unwrap();
        let ratio = sensitivity(&lossy, 1.0).unwrap() / sensitivity(&cfg, 1.0).unwrap();
        assert_relative_eq!(ratio, 1.0 / 0.7, epsilon = 1e-12);

        assert!(matches!(sensitivity(&cfg, 0.0), Err(Error::DivergentSensitivity { .. })));
        assert!(matches!(sensitivity(&cfg, PI), Err(Error::DivergentSensitivity { .. })));
    }

    #[test]
    fn squeezed_sensitivity() {
        let cfg = MzConfig::squeezed(10.0, 1.0, PI, 1.0, FRAC_PI_2).unwrap();
        let dphi = sensitivity(&cfg, FRAC_PI_2).unwrap();
        // slope of the mean is η(|α|² − sinh² r) at π/2
        let want = 14.914_626_169_203_075f64.sqrt() / (100.0 - 1f64.sinh().powi(2));
        assert_relative_eq!(dphi, want, epsilon = 1e-6);
        // squeezing beats the coherent shot-noise limit 1/|α|
        assert!(dphi < 0.1);
        assert!(matches!(sensitivity(&cfg, 0.0), Err(Error::DivergentSensitivity { .. })));
    }

    #[test]
    fn config_validation() {
        assert!(MzConfig::coherent(10.0, 1.5, FRAC_PI_2).is_err());
        assert!(MzConfig::coherent(10.0, 0.0, FRAC_PI_2).is_err());
        assert!(MzConfig::coherent(-1.0, 0.5, FRAC_PI_2).is_err());
        assert!(MzConfig::squeezed(10.0, -1.0, PI, 0.5, FRAC_PI_2).is_err());
        assert!(MzConfig::coherent(10.0, 1.0, FRAC_PI_2).is_ok());
    }

    #[test]
    fn non_integer_coherent_outcome_rejected() {
        let cfg = MzConfig::coherent(10.0, 0.7, FRAC_PI_2).unwrap();
        let prior = PriorSpec::flat(0.99, FRAC_PI_2, 0.0, PI).unwrap();
        assert!(matches!(
            mz_posterior(2.5, &cfg, &prior, 1e-8),
            Err(Error::InvalidOutcome { .. })
        ));
    }
}
