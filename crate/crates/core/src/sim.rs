//! Monte Carlo sampling of the measurement models, used to check the analytic
//! distributions and the calibration of the posterior.
//!
//! Draws are produced in fixed-size chunks. Chunk `k` uses a ChaCha8 stream
//! seeded from the master seed with stream number `k`, so a batch is
//! bit-identical for a given seed no matter how many threads run it.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::bayes::AltPrior;
use crate::error::{ensure, Result};
use crate::mz;
use crate::numerics::{adaptive_integrate, Moments};
use crate::paradox::{MeasurementModel, Scenario};

/// Draws per independently seeded stream.
pub const CHUNK_SIZE: usize = 1 << 14;

/// Minimum batch size accepted by [`empirical_distribution_check`].
pub const MIN_CHECK_COUNT: usize = 10_000;

/// Largest tolerated `|empirical − analytic|` cell probability at 10⁶ draws.
pub const MAX_FREQ_ERROR: f64 = 3e-3;

/// [`MAX_FREQ_ERROR`], widened by `√(10⁶/n)` for smaller batches to track
/// the binomial fluctuation of cell frequencies.
pub fn freq_error_bound(count: usize) -> f64 {
    MAX_FREQ_ERROR * (1e6 / count as f64).sqrt().max(1.0)
}

/// Largest tolerated per-decile calibration error for well-populated bins.
pub const CALIBRATION_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    CoherentMz,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcomes {
    Counts(Vec<i64>),
    Reals(Vec<f64>),
}

impl Outcomes {
    pub fn len(&self) -> usize {
        match self {
            Outcomes::Counts(v) => v.len(),
            Outcomes::Reals(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sample mean and (unbiased) variance.
    pub fn moments(&self) -> Moments {
        let xs: Vec<f64> = match self {
            Outcomes::Counts(v) => v.iter().map(|&d| d as f64).collect(),
            Outcomes::Reals(v) => v.clone(),
        };
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let variance = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Moments { mean, variance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub outcomes: Outcomes,
    pub model_tag: ModelTag,
    /// Phase the outcomes were drawn at; `None` for a bare Gaussian.
    pub phase_used: Option<f64>,
    pub seed: u64,
    pub count: usize,
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Runs `draw` `count` times across deterministic per-chunk streams,
/// returning results in (chunk, draw) order.
fn chunked<T, F>(count: usize, seed: u64, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let chunks = count.div_ceil(CHUNK_SIZE);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = chunk_rng(seed, k);
            let n = CHUNK_SIZE.min(count - k * CHUNK_SIZE);
            (0..n).map(|_| draw(&mut rng)).collect::<Vec<T>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Poisson draw; rate zero gives zero.
fn poisson_draw<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> i64 {
    if rate <= 0.0 {
        return 0;
    }
    Poisson::new(rate).expect("positive finite rate").sample(rng) as i64
}

fn coherent_draw<R: Rng + ?Sized>(alpha_mag: f64, eta: f64, phi: f64, rng: &mut R) -> i64 {
    let (mu1, mu2) = mz::coherent_rates(alpha_mag, eta, phi);
    poisson_draw(mu1, rng) - poisson_draw(mu2, rng)
}

/// Photocount differences `N₁ − N₂` with `N₁ ~ Poisson(η|α|² cos²(φ/2))` and
/// `N₂ ~ Poisson(η|α|² sin²(φ/2))`.
pub fn sample_coherent_mz(count: usize, alpha_mag: f64, eta: f64, phi: f64, seed: u64) -> Result<SampleBatch> {
    ensure(count >= 1, || "sample count must be at least 1".to_string())?;
    ensure(alpha_mag.is_finite() && alpha_mag >= 0.0, || {
        format!("|alpha| = {alpha_mag} must be finite and >= 0")
    })?;
    ensure(eta > 0.0 && eta <= 1.0, || format!("efficiency {eta} must lie in (0, 1]"))?;
    ensure(phi.is_finite(), || format!("phase {phi} must be finite"))?;
    let draws = chunked(count, seed, |rng| coherent_draw(alpha_mag, eta, phi, rng));
    Ok(SampleBatch {
        outcomes: Outcomes::Counts(draws),
        model_tag: ModelTag::CoherentMz,
        phase_used: Some(phi),
        seed,
        count,
    })
}

pub fn sample_gaussian_model(count: usize, mean: f64, variance: f64, seed: u64) -> Result<SampleBatch> {
    ensure(count >= 1, || "sample count must be at least 1".to_string())?;
    ensure(variance > 0.0 && variance.is_finite() && mean.is_finite(), || {
        format!("Gaussian N({mean}, {variance}) needs finite mean and positive variance")
    })?;
    let normal = Normal::new(mean, variance.sqrt()).expect("validated parameters");
    let draws = chunked(count, seed, |rng| normal.sample(rng));
    Ok(SampleBatch {
        outcomes: Outcomes::Reals(draws),
        model_tag: ModelTag::Gaussian,
        phase_used: None,
        seed,
        count,
    })
}

/// Draws from `model` at `phase`. Squeezed interferometers use their
/// Gaussian approximation.
pub fn sample_model(model: &MeasurementModel, phase: f64, count: usize, seed: u64) -> Result<SampleBatch> {
    match model {
        MeasurementModel::Interferometer(cfg) if cfg.is_lattice() => {
            sample_coherent_mz(count, cfg.alpha_mag(), cfg.efficiency, phase, seed)
        }
        _ => {
            let m = model.moments(phase);
            let mut batch = sample_gaussian_model(count, m.mean, m.variance, seed)?;
            batch.phase_used = Some(phase);
            Ok(batch)
        }
    }
}

/// Reference law a batch is compared against.
pub enum Analytic<'a> {
    /// Probability mass of each integer outcome.
    Pmf(&'a (dyn Fn(i64) -> f64 + Sync)),
    /// Density, binned into `bins` equal cells over `[lo, hi]`; the mass
    /// outside forms one extra cell.
    Pdf {
        pdf: &'a (dyn Fn(f64) -> f64 + Sync),
        lo: f64,
        hi: f64,
        bins: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionCheck {
    /// Largest `|empirical − analytic|` cell probability.
    pub max_abs_freq_error: f64,
    /// Pearson statistic over cells with expected count ≥ 5 (sparser cells pooled).
    pub chi_square_stat: f64,
    pub dof: usize,
    /// 99.9% quantile of χ² with `dof` degrees of freedom.
    pub chi_square_critical: f64,
    pub count: usize,
}

impl DistributionCheck {
    pub fn chi_square_passes(&self) -> bool {
        self.chi_square_stat <= self.chi_square_critical
    }

    pub fn passes(&self) -> bool {
        self.chi_square_passes() && self.max_abs_freq_error < freq_error_bound(self.count)
    }
}

/// Compares empirical cell frequencies with the analytic law.
pub fn empirical_distribution_check(batch: &SampleBatch, analytic: &Analytic<'_>) -> Result<DistributionCheck> {
    ensure(batch.count >= MIN_CHECK_COUNT, || {
        format!("distribution check needs at least {MIN_CHECK_COUNT} samples, got {}", batch.count)
    })?;
    let n = batch.count as f64;
    // (observed count, analytic probability) per cell
    let cells: Vec<(f64, f64)> = match (&batch.outcomes, analytic) {
        (Outcomes::Counts(v), Analytic::Pmf(pmf)) => {
            let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
            for &d in v {
                *counts.entry(d).or_default() += 1;
            }
            let lo = *counts.keys().next().expect("nonempty batch");
            let hi = *counts.keys().next_back().expect("nonempty batch");
            let span = (hi - lo).max(1);
            // include a margin so that analytic mass the batch missed is still compared
            let inner: Vec<(f64, f64)> = (lo - span..=hi + span)
                .map(|d| (counts.get(&d).copied().unwrap_or(0) as f64, pmf(d)))
                .collect();
            let covered: f64 = inner.iter().map(|c| c.1).sum();
            let mut cells = inner;
            cells.push((0.0, (1.0 - covered).max(0.0)));
            cells
        }
        (Outcomes::Reals(v), Analytic::Pdf { pdf, lo, hi, bins }) => {
            ensure(*bins >= 1 && lo < hi, || "binning needs at least one cell and lo < hi".to_string())?;
            let width = (hi - lo) / *bins as f64;
            let mut counts = vec![0usize; *bins + 1];
            for &x in v {
                let k = ((x - lo) / width).floor();
                let idx = if k >= 0.0 && k < *bins as f64 { k as usize } else { *bins };
                counts[idx] += 1;
            }
            let probs = (0..*bins)
                .into_par_iter()
                .map(|k| {
                    let a = lo + k as f64 * width;
                    adaptive_integrate(pdf, a, a + width, 1e-12).map(|r| r.value)
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let inside: f64 = probs.iter().sum();
            counts
                .iter()
                .zip(probs.iter().copied().chain(std::iter::once((1.0 - inside).max(0.0))))
                .map(|(&c, p)| (c as f64, p))
                .collect()
        }
        _ => {
            return Err(crate::Error::InvalidParameter(
                "analytic law does not match the batch's outcome type".into(),
            ))
        }
    };

    let max_abs_freq_error = cells
        .iter()
        .map(|&(obs, p)| (obs / n - p).abs())
        .fold(0.0, f64::max);

    let mut chi = 0.0;
    let mut used = 0usize;
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for &(obs, p) in &cells {
        let expected = n * p;
        if expected >= 5.0 {
            chi += (obs - expected).powi(2) / expected;
            used += 1;
        } else {
            pooled_obs += obs;
            pooled_exp += expected;
        }
    }
    if pooled_exp > 0.0 {
        chi += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        used += 1;
    }
    let dof = used.saturating_sub(1).max(1);
    let chi_square_critical = ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.999);
    Ok(DistributionCheck {
        max_abs_freq_error,
        chi_square_stat: chi,
        dof,
        chi_square_critical,
        count: batch.count,
    })
}

/// How calibration trials pick the true hypothesis and phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthGenerator {
    /// Null with probability `z₀`, otherwise a phase drawn from the alternative prior.
    #[default]
    Prior,
    AlwaysNull,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub null_count: usize,
    /// Empirical frequency of true-null trials; `None` for an empty bin.
    pub null_fraction: Option<f64>,
    pub mean_posterior: Option<f64>,
}

impl CalibrationBin {
    /// `|null_fraction − mean_posterior|`, or `None` for an empty bin.
    pub fn calibration_error(&self) -> Option<f64> {
        Some((self.null_fraction? - self.mean_posterior?).abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub bins: Vec<CalibrationBin>,
    pub n_trials: usize,
    pub seed: u64,
}

impl CalibrationTable {
    /// Largest calibration error over bins holding at least `min_count` trials.
    pub fn max_error(&self, min_count: usize) -> f64 {
        self.bins
            .iter()
            .filter(|b| b.count >= min_count.max(1))
            .filter_map(CalibrationBin::calibration_error)
            .fold(0.0, f64::max)
    }

    /// Every nonempty bin is within [`CALIBRATION_TOLERANCE`] or, for sparse
    /// bins, within four binomial standard errors.
    pub fn passes(&self) -> bool {
        self.bins.iter().all(|b| match (b.calibration_error(), b.mean_posterior) {
            (Some(err), Some(p)) => {
                let se = (p * (1.0 - p) / b.count as f64).sqrt();
                err < CALIBRATION_TOLERANCE.max(4.0 * se)
            }
            _ => true,
        })
    }
}

fn draw_alt_phase<R: Rng + ?Sized>(alt: &AltPrior, rng: &mut R) -> f64 {
    match *alt {
        AltPrior::Flat { lo, hi } => rng.random_range(lo..hi),
        AltPrior::WrappedNormal { center, sigma, period } => {
            let x: f64 = Normal::new(center, sigma).expect("validated prior").sample(rng);
            let lo = center - 0.5 * period;
            lo + (x - lo).rem_euclid(period)
        }
        AltPrior::PointMass { value } => value,
    }
}

enum Draw {
    Count(i64),
    Real(f64),
}

fn draw_outcome<R: Rng + ?Sized>(model: &MeasurementModel, phase: f64, rng: &mut R) -> Draw {
    match model {
        MeasurementModel::Interferometer(cfg) if cfg.is_lattice() => {
            Draw::Count(coherent_draw(cfg.alpha_mag(), cfg.efficiency, phase, rng))
        }
        _ => {
            let m = model.moments(phase);
            Draw::Real(Normal::new(m.mean, m.std_dev()).expect("positive variance").sample(rng))
        }
    }
}

/// Simulates `n_trials` experiments from the generative model and bins them
/// by the reported `z̄₀` into deciles.
///
/// Posteriors of lattice outcomes are computed once per distinct count.
pub fn posterior_calibration(
    n_trials: usize,
    scenario: &Scenario,
    generator: TruthGenerator,
    seed: u64,
    tol: f64,
) -> Result<CalibrationTable> {
    ensure(n_trials >= 1, || "calibration needs at least one trial".to_string())?;
    scenario.prior.validate()?;
    let prior = scenario.prior;
    let trials: Vec<(bool, Draw)> = chunked(n_trials, seed, |rng| {
        let null_true = match generator {
            TruthGenerator::AlwaysNull => true,
            TruthGenerator::Prior => rng.random::<f64>() < prior.null_weight,
        };
        let phase = if null_true {
            prior.null_value
        } else {
            draw_alt_phase(&prior.alt, rng)
        };
        (null_true, draw_outcome(&scenario.model, phase, rng))
    });

    let mut distinct: Vec<i64> = trials
        .iter()
        .filter_map(|(_, d)| match d {
            Draw::Count(c) => Some(*c),
            Draw::Real(_) => None,
        })
        .collect();
    distinct.sort_unstable();
    distinct.dedup();
    let lattice: BTreeMap<i64, f64> = distinct
        .par_iter()
        .map(|&d| scenario.posterior(d as f64, tol).map(|r| (d, r.posterior_null)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();
    let posteriors: Vec<f64> = trials
        .par_iter()
        .map(|(_, d)| match d {
            Draw::Count(c) => Ok(lattice[c]),
            Draw::Real(x) => scenario.posterior(*x, tol).map(|r| r.posterior_null),
        })
        .collect::<Result<Vec<_>>>()?;

    const DECILES: usize = 10;
    let mut count = [0usize; DECILES];
    let mut nulls = [0usize; DECILES];
    let mut sums = [0.0f64; DECILES];
    for ((null_true, _), &z) in trials.iter().zip(&posteriors) {
        let k = ((z * DECILES as f64).floor() as usize).min(DECILES - 1);
        count[k] += 1;
        nulls[k] += usize::from(*null_true);
        sums[k] += z;
    }
    let bins = (0..DECILES)
        .map(|k| CalibrationBin {
            lo: k as f64 / DECILES as f64,
            hi: (k + 1) as f64 / DECILES as f64,
            count: count[k],
            null_count: nulls[k],
            null_fraction: (count[k] > 0).then(|| nulls[k] as f64 / count[k] as f64),
            mean_posterior: (count[k] > 0).then(|| sums[k] / count[k] as f64),
        })
        .collect();
    Ok(CalibrationTable {
        bins,
        n_trials,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunk_streams_differ() {
        let a: u64 = chunk_rng(7, 0).random();
        let b: u64 = chunk_rng(7, 1).random();
        let c: u64 = chunk_rng(7, 0).random();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn batch_lengths_and_determinism() {
        let n = 3 * CHUNK_SIZE + 17;
        let a = sample_coherent_mz(n, 3.0, 0.9, 1.0, 11).unwrap();
        let b = sample_coherent_mz(n, 3.0, 0.9, 1.0, 11).unwrap();
        assert_eq!(a.outcomes.len(), n);
        assert_eq!(a, b);
        let c = sample_coherent_mz(n, 3.0, 0.9, 1.0, 12).unwrap();
        assert_ne!(a.outcomes, c.outcomes);
    }

    #[test]
    fn zero_phase_is_one_sided() {
        let b = sample_coherent_mz(20_000, 5.0, 0.8, 0.0, 3).unwrap();
        match b.outcomes {
            Outcomes::Counts(v) => assert!(v.iter().all(|&d| d >= 0)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(sample_coherent_mz(0, 1.0, 0.5, 0.0, 1).is_err());
        assert!(sample_coherent_mz(10, 1.0, 1.5, 0.0, 1).is_err());
        assert!(sample_gaussian_model(10, 0.0, 0.0, 1).is_err());
        let small = sample_gaussian_model(100, 0.0, 1.0, 1).unwrap();
        let pdf = |x: f64| crate::numerics::gaussian_pdf(x, 0.0, 1.0);
        let analytic = Analytic::Pdf { pdf: &pdf, lo: -5.0, hi: 5.0, bins: 50 };
        assert!(empirical_distribution_check(&small, &analytic).is_err());
    }

    #[test]
    fn calibration_pass_rule() {
        let bin = |count, null_count, mean: f64| CalibrationBin {
            lo: 0.0,
            hi: 0.1,
            count,
            null_count,
            null_fraction: Some(null_count as f64 / count as f64),
            mean_posterior: Some(mean),
        };
        let table = |b| CalibrationTable { bins: vec![b], n_trials: 0, seed: 0 };
        assert!(table(bin(1000, 520, 0.5)).passes());
        assert!(!table(bin(1000, 600, 0.5)).passes());
        // eight trials: 0.25 off is within four standard errors
        assert!(table(bin(8, 6, 0.5)).passes());
    }

    #[test]
    fn mismatched_law_is_rejected() {
        let b = sample_gaussian_model(MIN_CHECK_COUNT, 0.0, 1.0, 1).unwrap();
        let pmf = |_: i64| 0.0;
        assert!(empirical_distribution_check(&b, &Analytic::Pmf(&pmf)).is_err());
    }
}
