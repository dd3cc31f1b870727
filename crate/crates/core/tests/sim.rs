//! Monte Carlo samples against the analytic laws.

use std::f64::consts::{FRAC_PI_2, PI};

use lindley_core::bayes::PriorSpec;
use lindley_core::mz::{coherent_log_pmf, MzConfig};
use lindley_core::numerics::gaussian_pdf;
use lindley_core::paradox::Scenario;
use lindley_core::sim::{
    empirical_distribution_check, posterior_calibration, sample_coherent_mz, sample_gaussian_model, Analytic,
    Outcomes, TruthGenerator,
};

const MILLION: usize = 1_000_000;

#[test]
fn coherent_sample_moments() {
    let b = sample_coherent_mz(MILLION, 10.0, 0.7, FRAC_PI_2, 42).unwrap();
    let m = b.outcomes.moments();
    assert!(m.mean.abs() < 0.03, "{m:?}");
    assert!((m.variance - 70.0).abs() < 1.0, "{m:?}");
}

#[test]
fn poisson_sampler_moments() {
    // at φ = 0 the difference is a single Poisson variate with rate η|α|²
    for rate in [0.5f64, 10.0, 70.0] {
        let b = sample_coherent_mz(MILLION, rate.sqrt(), 1.0, 0.0, 9).unwrap();
        let m = b.outcomes.moments();
        let se_mean = (rate / MILLION as f64).sqrt();
        // Var of the sample variance for Poisson: (μ₄ − σ⁴)/n with μ₄ = λ(1 + 3λ)
        let se_var = ((rate * (1.0 + 3.0 * rate) - rate * rate) / MILLION as f64).sqrt();
        assert!((m.mean - rate).abs() < 5.0 * se_mean, "rate {rate}: {m:?}");
        assert!((m.variance - rate).abs() < 5.0 * se_var, "rate {rate}: {m:?}");
    }
}

#[test]
fn gaussian_sample_moments_and_replay() {
    let b = sample_gaussian_model(MILLION, 14.142, 0.0677, 5).unwrap();
    let m = b.outcomes.moments();
    assert!((m.mean - 14.142).abs() < 1e-3);
    let ratio = m.variance / 0.0677;
    assert!((0.995..=1.005).contains(&ratio), "{ratio}");
    let again = sample_gaussian_model(10, 14.142, 0.0677, 5).unwrap();
    match (&b.outcomes, &again.outcomes) {
        (Outcomes::Reals(a), Outcomes::Reals(c)) => assert_eq!(&a[..10], &c[..]),
        _ => unreachable!(),
    }
}

#[test]
fn skellam_frequencies_match_pmf() {
    let b = sample_coherent_mz(MILLION, 10.0, 0.7, FRAC_PI_2, 2024).unwrap();
    let pmf = |d: i64| coherent_log_pmf(d, 10.0, 0.7, FRAC_PI_2).prob();
    let check = empirical_distribution_check(&b, &Analytic::Pmf(&pmf)).unwrap();
    assert!(check.max_abs_freq_error < 3e-3, "{check:?}");
    assert!(check.chi_square_passes(), "{check:?}");
    let again = empirical_distribution_check(&b, &Analytic::Pmf(&pmf)).unwrap();
    assert_eq!(check, again);
}

#[test]
fn gaussian_frequencies_match_pdf() {
    let (mean, var) = (14.142, 0.0677);
    let sd = f64::sqrt(var);
    let b = sample_gaussian_model(MILLION, mean, var, 77).unwrap();
    let pdf = |x: f64| gaussian_pdf(x, mean, var);
    let analytic = Analytic::Pdf {
        pdf: &pdf,
        lo: mean - 5.0 * sd,
        hi: mean + 5.0 * sd,
        bins: 50,
    };
    let check = empirical_distribution_check(&b, &analytic).unwrap();
    assert!(check.chi_square_passes(), "{check:?}");
    assert!(check.max_abs_freq_error < 3e-3);
}

#[test]
fn perturbed_pmf_is_detected() {
    let b = sample_coherent_mz(200_000, 10.0, 0.7, FRAC_PI_2, 1).unwrap();
    let pmf = |d: i64| coherent_log_pmf(d, 10.0, 0.75, FRAC_PI_2).prob();
    let check = empirical_distribution_check(&b, &Analytic::Pmf(&pmf)).unwrap();
    assert!(!check.chi_square_passes(), "{check:?}");
}

fn calibration_scenario(z0: f64) -> Scenario {
    let cfg = MzConfig::coherent(10.0, 0.7, FRAC_PI_2).unwrap();
    Scenario::interferometer(cfg, PriorSpec::flat(z0, FRAC_PI_2, 0.0, PI).unwrap())
}

#[test]
fn always_null_generator_gives_unit_fractions() {
    let t = posterior_calibration(20_000, &calibration_scenario(0.5), TruthGenerator::AlwaysNull, 3, 1e-9).unwrap();
    assert_eq!(t.bins.iter().map(|b| b.count).sum::<usize>(), 20_000);
    for b in &t.bins {
        if let Some(f) = b.null_fraction {
            assert_eq!(f, 1.0);
        }
    }
}

#[test]
fn posterior_is_calibrated() {
    let t = posterior_calibration(100_000, &calibration_scenario(0.5), TruthGenerator::Prior, 8, 1e-9).unwrap();
    assert_eq!(t.bins.iter().map(|b| b.count).sum::<usize>(), 100_000);
    assert!(t.max_error(1) < 0.05, "{t:?}");
    let again = posterior_calibration(100_000, &calibration_scenario(0.5), TruthGenerator::Prior, 8, 1e-9).unwrap();
    assert_eq!(t, again);
}

#[test]
fn homodyne_calibration_with_continuous_outcomes() {
    let state = lindley_core::homodyne::SqueezedCoherentState::amplitude_squeezed(3.0, 0.5).unwrap();
    let s = Scenario::homodyne(state, PriorSpec::flat(0.5, 0.0, -PI, PI).unwrap());
    let t = posterior_calibration(20_000, &s, TruthGenerator::Prior, 4, 1e-8).unwrap();
    for b in t.bins.iter().filter(|b| b.count > 0) {
        let p = b.mean_posterior.unwrap();
        let se = (p * (1.0 - p) / b.count as f64).sqrt();
        let err = b.calibration_error().unwrap();
        assert!(err < 4.0 * se + 2e-3, "{b:?}");
    }
}
