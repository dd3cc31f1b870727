//! Frequentist counterpart tests and the comparison with the Bayesian posterior.
//!
//! An outcome is a *paradox* when a significance test at level `α` rejects
//! the null while the posterior still favors it (`z̄₀ > ½`).

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::bayes::{PosteriorReport, PriorSpec};
use crate::error::{ensure, Error, Result};
use crate::homodyne::{self, HomodyneConfig, SqueezedCoherentState};
use crate::mz::{self, MzConfig, MzInput, VarianceVariant};
use crate::numerics::{log_sum_exp, Moments};

/// Upper end of the outcome range searched for a paradox window, in σ units.
pub const WINDOW_SPAN_SIGMAS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    AgreeNull,
    AgreeAlt,
    Paradox,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::AgreeNull => "agree_null",
            Classification::AgreeAlt => "agree_alt",
            Classification::Paradox => "paradox",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Classification {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "agree_null" => Ok(Classification::AgreeNull),
            "agree_alt" => Ok(Classification::AgreeAlt),
            "paradox" => Ok(Classification::Paradox),
            other => Err(format!("unknown classification '{other}'")),
        }
    }
}

/// Three-way verdict: `Paradox` iff the test rejects and `z̄₀ > ½`.
pub fn classify(z_bar0: f64, pvalue: f64, alpha_freq: f64) -> Classification {
    let rejects = pvalue < alpha_freq;
    match (rejects, z_bar0 > 0.5) {
        (true, true) => Classification::Paradox,
        (true, false) => Classification::AgreeAlt,
        (false, _) => Classification::AgreeNull,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    #[default]
    TwoSided,
    /// Tail in the direction of the observed deviation only.
    OneSided,
}

/// Outcome law as a function of phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasurementModel {
    Homodyne {
        state: SqueezedCoherentState,
        quadrature_phase: f64,
    },
    Interferometer(MzConfig),
}

impl MeasurementModel {
    pub fn moments(&self, phase: f64) -> Moments {
        match self {
            MeasurementModel::Homodyne {
                state,
                quadrature_phase,
            } => homodyne::quadrature_moments(
                state,
                &HomodyneConfig {
                    quadrature_phase: *quadrature_phase,
                    shift: phase,
                },
            ),
            MeasurementModel::Interferometer(cfg) => mz::outcome_moments(cfg, phase),
        }
    }

    pub fn log_likelihood(&self, outcome: f64, phase: f64) -> f64 {
        match self {
            MeasurementModel::Homodyne {
                state,
                quadrature_phase,
            } => homodyne::outcome_log_pdf(
                outcome,
                state,
                &HomodyneConfig {
                    quadrature_phase: *quadrature_phase,
                    shift: phase,
                },
            ),
            MeasurementModel::Interferometer(cfg) => mz::outcome_log_likelihood(cfg, outcome, phase),
        }
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self, MeasurementModel::Interferometer(cfg) if cfg.is_lattice())
    }
}

/// Probability, under the model at `null_phase`, of an outcome at least as
/// far from the null mean as `outcome`.
///
/// Lattice models sum the exact pmf tail; Gaussian models use `erfc`.
pub fn frequentist_pvalue(
    outcome: f64,
    model: &MeasurementModel,
    null_phase: f64,
    sidedness: Sidedness,
) -> f64 {
    let m = model.moments(null_phase);
    let dev = (outcome - m.mean).abs();
    if dev == 0.0 {
        return 1.0;
    }
    let p = if model.is_lattice() {
        let log_pmf = |d: i64| model.log_likelihood(d as f64, null_phase);
        let upper = || lattice_tail(&log_pmf, (m.mean + dev - 1e-9).ceil() as i64, 1);
        let lower = || lattice_tail(&log_pmf, (m.mean - dev + 1e-9).floor() as i64, -1);
        match sidedness {
            Sidedness::TwoSided => {
                if (m.mean + dev - 1e-9).ceil() <= (m.mean - dev + 1e-9).floor() {
                    return 1.0;
                }
                upper() + lower()
            }
            Sidedness::OneSided if outcome >= m.mean => upper(),
            Sidedness::OneSided => lower(),
        }
    } else {
        let z = dev / (m.variance.sqrt() * std::f64::consts::SQRT_2);
        match sidedness {
            Sidedness::TwoSided => erfc(z),
            Sidedness::OneSided => 0.5 * erfc(z),
        }
    };
    p.min(1.0)
}

/// `Σ_{k ≥ 0} pmf(start + k·step)`, stopped once terms are negligible.
fn lattice_tail<F: Fn(i64) -> f64>(log_pmf: &F, start: i64, step: i64) -> f64 {
    const MAX_TERMS: usize = 10_000_000;
    let mut terms = Vec::new();
    let mut best = f64::NEG_INFINITY;
    let mut d = start;
    for _ in 0..MAX_TERMS {
        let t = log_pmf(d);
        best = best.max(t);
        terms.push(t);
        if t < best - 45.0 || (best == f64::NEG_INFINITY && terms.len() > 64) {
            break;
        }
        d += step;
    }
    log_sum_exp(&terms).exp()
}

/// Significance test settings shared by every evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestSettings {
    pub alpha_freq: f64,
    pub sidedness: Sidedness,
    /// Relative tolerance of the marginal-likelihood quadrature.
    pub tol: f64,
}

impl Default for TestSettings {
    fn default() -> Self {
        TestSettings {
            alpha_freq: 0.05,
            sidedness: Sidedness::TwoSided,
            tol: 1e-8,
        }
    }
}

impl TestSettings {
    pub fn validate(&self) -> Result<()> {
        ensure(self.alpha_freq > 0.0 && self.alpha_freq < 1.0, || {
            format!("alpha_freq = {} must lie in (0, 1)", self.alpha_freq)
        })?;
        ensure(self.tol > 0.0 && self.tol.is_finite(), || {
            format!("tolerance {} must be positive", self.tol)
        })
    }
}

/// A measurement model together with the prior used to test it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub model: MeasurementModel,
    pub prior: PriorSpec,
    /// Phase at which the σ used for `t = |d − d̄|/σ` is evaluated; the null phase when `None`.
    pub sigma_phase: Option<f64>,
}

impl Scenario {
    pub fn homodyne(state: SqueezedCoherentState, prior: PriorSpec) -> Self {
        Scenario {
            model: MeasurementModel::Homodyne {
                state,
                quadrature_phase: 0.0,
            },
            prior,
            sigma_phase: None,
        }
    }

    pub fn interferometer(config: MzConfig, prior: PriorSpec) -> Self {
        Scenario {
            model: MeasurementModel::Interferometer(config),
            prior,
            sigma_phase: None,
        }
    }

    pub fn null_moments(&self) -> Moments {
        self.model.moments(self.prior.null_value)
    }

    /// Scale used to express outcomes in σ units.
    pub fn sigma(&self) -> f64 {
        let phase = self.sigma_phase.unwrap_or(self.prior.null_value);
        self.model.moments(phase).std_dev()
    }

    /// Outcome `t` σ above the null mean, snapped to the lattice when needed.
    pub fn outcome_at(&self, t: f64) -> f64 {
        let d = self.null_moments().mean + t * self.sigma();
        if self.model.is_lattice() {
            d.round()
        } else {
            d
        }
    }

    pub fn sigma_units(&self, outcome: f64) -> f64 {
        (outcome - self.null_moments().mean).abs() / self.sigma()
    }

    pub fn posterior(&self, outcome: f64, tol: f64) -> Result<PosteriorReport> {
        match &self.model {
            MeasurementModel::Homodyne {
                state,
                quadrature_phase,
            } => homodyne::homodyne_posterior_at(outcome, state, *quadrature_phase, &self.prior, tol),
            MeasurementModel::Interferometer(cfg) => mz::mz_posterior(outcome, cfg, &self.prior, tol),
        }
    }

    pub fn pvalue(&self, outcome: f64, sidedness: Sidedness) -> f64 {
        frequentist_pvalue(outcome, &self.model, self.prior.null_value, sidedness)
    }
}

/// Bayesian and frequentist verdicts for one outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub outcome: f64,
    pub z_bar0: f64,
    pub pvalue: f64,
    pub classification: Classification,
    pub sigma_units: f64,
}

/// Full evaluation of one outcome; the returned posterior has its p-value
/// and classification filled in.
pub fn evaluate(
    scenario: &Scenario,
    outcome: f64,
    settings: &TestSettings,
) -> Result<(RegionReport, PosteriorReport)> {
    settings.validate()?;
    let mut posterior = scenario.posterior(outcome, settings.tol)?;
    let pvalue = scenario.pvalue(outcome, settings.sidedness);
    let classification = classify(posterior.posterior_null, pvalue, settings.alpha_freq);
    posterior.pvalue = Some(pvalue);
    posterior.classification = Some(classification);
    let region = RegionReport {
        outcome,
        z_bar0: posterior.posterior_null,
        pvalue,
        classification,
        sigma_units: scenario.sigma_units(outcome),
    };
    Ok((region, posterior))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParadoxWindow {
    pub lo_outcome: f64,
    pub hi_outcome: f64,
    pub lo_sigma: f64,
    pub hi_sigma: f64,
}

/// Outcomes scanned by [`paradox_window`]: `t ∈ [0, 8]` in steps of
/// `grid_step`, deduplicated after lattice snapping.
pub fn window_grid(scenario: &Scenario, grid_step: f64) -> Result<Vec<f64>> {
    ensure(grid_step > 0.0 && grid_step.is_finite(), || {
        format!("grid step {grid_step} must be positive")
    })?;
    let n = (WINDOW_SPAN_SIGMAS / grid_step + 1e-9).floor() as usize;
    let mut outcomes: Vec<f64> = (0..=n).map(|i| scenario.outcome_at(i as f64 * grid_step)).collect();
    outcomes.dedup();
    Ok(outcomes)
}

/// Longest contiguous run of `Paradox` outcomes on the `[0, 8σ]` grid above
/// the null mean, or `None` when there is no paradox at all.
pub fn paradox_window(
    scenario: &Scenario,
    settings: &TestSettings,
    grid_step: f64,
) -> Result<Option<ParadoxWindow>> {
    let outcomes = window_grid(scenario, grid_step)?;
    let reports = outcomes
        .par_iter()
        .map(|&d| evaluate(scenario, d, settings).map(|(r, _)| r))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(longest_paradox_run(&reports).map(|(a, b)| ParadoxWindow {
        lo_outcome: reports[a].outcome,
        hi_outcome: reports[b].outcome,
        lo_sigma: reports[a].sigma_units,
        hi_sigma: reports[b].sigma_units,
    }))
}

/// Index range `[first, last]` of the longest run of paradox reports; ties go to the earliest.
pub fn longest_paradox_run(reports: &[RegionReport]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for (i, r) in reports.iter().enumerate() {
        if r.classification == Classification::Paradox {
            let s = *start.get_or_insert(i);
            if best.is_none_or(|(a, b)| i - s > b - a) {
                best = Some((s, i));
            }
        } else {
            start = None;
        }
    }
    best
}

/// Which measurement a [`ScenarioSpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Homodyne,
    MzCoherent,
    MzSqueezed,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Homodyne => "homodyne",
            ModelKind::MzCoherent => "mz-coherent",
            ModelKind::MzSqueezed => "mz-squeezed",
        }
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "homodyne" => Ok(ModelKind::Homodyne),
            "mz-coherent" => Ok(ModelKind::MzCoherent),
            "mz-squeezed" => Ok(ModelKind::MzSqueezed),
            other => Err(format!(
                "unknown scenario '{other}' (expected homodyne, mz-coherent or mz-squeezed)"
            )),
        }
    }
}

/// Shape of the alternative prior. A wrapped normal is centered on the null
/// value with period equal to the width of the phase interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorShape {
    Flat,
    WrappedNormal { sigma: f64 },
}

/// Flat, serializable description of a scenario from which scans derive
/// each cell by overriding η, |α| or the prior width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ModelKind,
    pub alpha_mag: f64,
    pub squeeze_mag: f64,
    pub squeeze_phase: f64,
    /// Ignored by the homodyne model, which assumes ideal detectors.
    pub efficiency: f64,
    /// Null phase: `β₀` for homodyne, `φ₀` for the interferometers.
    pub null_value: f64,
    pub z0: f64,
    pub interval: (f64, f64),
    pub prior: PriorShape,
    pub variance_variant: VarianceVariant,
    pub sigma_phase: Option<f64>,
}

impl ScenarioSpec {
    /// `|α| = 10`, `r = 1`, `z₀ = 0.9`, flat shift prior on `[−π, π]`.
    pub fn homodyne_default() -> Self {
        ScenarioSpec {
            kind: ModelKind::Homodyne,
            alpha_mag: 10.0,
            squeeze_mag: 1.0,
            squeeze_phase: 0.0,
            efficiency: 1.0,
            null_value: 0.0,
            z0: 0.9,
            interval: homodyne::SHIFT_INTERVAL,
            prior: PriorShape::Flat,
            variance_variant: VarianceVariant::AsPrinted,
            sigma_phase: None,
        }
    }

    /// `|α| = 10`, `η = 0.7`, `φ₀ = π/2`, `z₀ = 0.99`, flat prior on `[0, π]`.
    pub fn mz_coherent_default() -> Self {
        ScenarioSpec {
            kind: ModelKind::MzCoherent,
            alpha_mag: 10.0,
            squeeze_mag: 0.0,
            squeeze_phase: 0.0,
            efficiency: 0.7,
            null_value: std::f64::consts::FRAC_PI_2,
            z0: 0.99,
            interval: mz::PHASE_INTERVAL,
            prior: PriorShape::Flat,
            variance_variant: VarianceVariant::AsPrinted,
            sigma_phase: None,
        }
    }

    /// Coherent default plus `r = 1`, `ϕ = π` squeezed vacuum.
    pub fn mz_squeezed_default() -> Self {
        ScenarioSpec {
            kind: ModelKind::MzSqueezed,
            squeeze_mag: 1.0,
            squeeze_phase: std::f64::consts::PI,
            ..Self::mz_coherent_default()
        }
    }

    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Homodyne => Self::homodyne_default(),
            ModelKind::MzCoherent => Self::mz_coherent_default(),
            ModelKind::MzSqueezed => Self::mz_squeezed_default(),
        }
    }

    pub fn prior_spec(&self) -> Result<PriorSpec> {
        let (lo, hi) = self.interval;
        let spec = match self.prior {
            PriorShape::Flat => PriorSpec::flat(self.z0, self.null_value, lo, hi)?,
            PriorShape::WrappedNormal { sigma } => {
                PriorSpec::wrapped_normal(self.z0, self.null_value, self.null_value, sigma, hi - lo)?
            }
        };
        Ok(spec)
    }

    pub fn build(&self) -> Result<Scenario> {
        ensure(self.efficiency > 0.0 && self.efficiency <= 1.0, || {
            format!("efficiency eta = {} must lie in (0, 1]", self.efficiency)
        })?;
        let prior = self.prior_spec()?;
        let mut scenario = match self.kind {
            ModelKind::Homodyne => {
                let state = SqueezedCoherentState::new(
                    self.alpha_mag,
                    0.0,
                    self.squeeze_mag,
                    self.squeeze_phase,
                )?;
                Scenario::homodyne(state, prior)
            }
            ModelKind::MzCoherent => {
                let cfg = MzConfig::coherent(self.alpha_mag, self.efficiency, self.null_value)?;
                Scenario::interferometer(cfg, prior)
            }
            ModelKind::MzSqueezed => {
                let cfg = MzConfig::new(
                    MzInput::Squeezed {
                        alpha_mag: self.alpha_mag,
                        squeeze_mag: self.squeeze_mag,
                        squeeze_phase: self.squeeze_phase,
                    },
                    self.efficiency,
                    self.null_value,
                )?
                .with_variant(self.variance_variant);
                Scenario::interferometer(cfg, prior)
            }
        };
        scenario.sigma_phase = self.sigma_phase;
        Ok(scenario)
    }
}

/// Grids for a scan. Optional axes default to the base scenario's value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScanAxes {
    /// Outcome offsets from the null mean, in σ units.
    pub outcome_sigma: Vec<f64>,
    pub efficiency: Option<Vec<f64>>,
    pub alpha_mag: Option<Vec<f64>>,
    /// Wrapped-normal prior widths.
    pub prior_sigma: Option<Vec<f64>>,
}

/// Axes with every optional grid resolved, so that the cell count is the
/// product of their lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedAxes {
    pub outcome_sigma: Vec<f64>,
    pub efficiency: Vec<f64>,
    pub alpha_mag: Vec<f64>,
    /// `None` keeps the base prior.
    pub prior_sigma: Vec<Option<f64>>,
}

impl ResolvedAxes {
    pub fn cell_count(&self) -> usize {
        self.outcome_sigma.len() * self.efficiency.len() * self.alpha_mag.len() * self.prior_sigma.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub t: f64,
    pub efficiency: f64,
    pub alpha_mag: f64,
    pub prior_sigma: Option<f64>,
    pub report: RegionReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMetadata {
    pub base: ScenarioSpec,
    pub settings: TestSettings,
    pub generator: String,
    /// Wall-clock stamp, left empty unless the caller asks for one so that
    /// output files stay reproducible.
    pub timestamp: Option<String>,
}

/// Cells are ordered with the outcome axis varying fastest, then prior
/// width, then |α|, then η.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub axes: ResolvedAxes,
    pub cells: Vec<ScanCell>,
    pub metadata: ScanMetadata,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanError {
    #[error("scan axes are invalid: {0}")]
    InvalidAxes(String),
    #[error("scan cell (t = {t}, eta = {efficiency}, alpha = {alpha_mag}, prior sigma = {prior_sigma:?}) failed: {source}")]
    Cell {
        t: f64,
        efficiency: f64,
        alpha_mag: f64,
        prior_sigma: Option<f64>,
        source: Error,
    },
}

impl ScanError {
    pub fn is_numerical(&self) -> bool {
        matches!(self, ScanError::Cell { source, .. } if source.is_numerical())
    }
}

fn resolve_axes(base: &ScenarioSpec, axes: &ScanAxes) -> std::result::Result<ResolvedAxes, ScanError> {
    let check = |name: &str, v: &Option<Vec<f64>>| match v {
        Some(v) if v.is_empty() => Err(ScanError::InvalidAxes(format!("{name} axis is empty"))),
        Some(v) if v.iter().any(|x| !x.is_finite()) => {
            Err(ScanError::InvalidAxes(format!("{name} axis has non-finite values")))
        }
        _ => Ok(()),
    };
    if axes.outcome_sigma.is_empty() {
        return Err(ScanError::InvalidAxes("outcome axis is empty".into()));
    }
    if axes.outcome_sigma.iter().any(|x| !x.is_finite()) {
        return Err(ScanError::InvalidAxes("outcome axis has non-finite values".into()));
    }
    check("efficiency", &axes.efficiency)?;
    check("alpha", &axes.alpha_mag)?;
    check("prior sigma", &axes.prior_sigma)?;
    Ok(ResolvedAxes {
        outcome_sigma: axes.outcome_sigma.clone(),
        efficiency: axes.efficiency.clone().unwrap_or_else(|| vec![base.efficiency]),
        alpha_mag: axes.alpha_mag.clone().unwrap_or_else(|| vec![base.alpha_mag]),
        prior_sigma: match &axes.prior_sigma {
            Some(v) => v.iter().copied().map(Some).collect(),
            None => vec![None],
        },
    })
}

/// Evaluates every grid point. Cells run in parallel; the result is
/// independent of scheduling.
pub fn scan(
    base: &ScenarioSpec,
    axes: &ScanAxes,
    settings: &TestSettings,
) -> std::result::Result<ScanTable, ScanError> {
    let resolved = resolve_axes(base, axes)?;
    let mut coords = Vec::with_capacity(resolved.cell_count());
    for &eta in &resolved.efficiency {
        for &alpha in &resolved.alpha_mag {
            for &ps in &resolved.prior_sigma {
                for &t in &resolved.outcome_sigma {
                    coords.push((t, eta, alpha, ps));
                }
            }
        }
    }

    let results: Vec<std::result::Result<ScanCell, ScanError>> = coords
        .par_iter()
        .map(|&(t, efficiency, alpha_mag, prior_sigma)| {
            let cell = || -> Result<ScanCell> {
                settings.validate()?;
                let mut spec = *base;
                spec.efficiency = efficiency;
                spec.alpha_mag = alpha_mag;
                if let Some(sigma) = prior_sigma {
                    spec.prior = PriorShape::WrappedNormal { sigma };
                }
                let scenario = spec.build()?;
                let outcome = scenario.outcome_at(t);
                let (report, _) = evaluate(&scenario, outcome, settings)?;
                Ok(ScanCell {
                    t,
                    efficiency,
                    alpha_mag,
                    prior_sigma,
                    report,
                })
            };
            cell().map_err(|source| ScanError::Cell {
                t,
                efficiency,
                alpha_mag,
                prior_sigma,
                source,
            })
        })
        .collect();

    let cells = results.into_iter().collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(ScanTable {
        axes: resolved,
        cells,
        metadata: ScanMetadata {
            base: *base,
            settings: *settings,
            generator: concat!("lindley-core ", env!("CARGO_PKG_VERSION")).to_string(),
            timestamp: None,
        },
    })
}

/// `start, start + step, …` up to and including `stop` (within rounding).
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if step.is_nan() || step <= 0.0 || stop < start {
        return vec![start];
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}
