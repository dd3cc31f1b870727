use std::f64::consts::PI;
use std::fmt::Write as _;

use lindley_core::bayes::OutcomeRegime;
use lindley_core::mz::coherent_log_pmf;
use lindley_core::numerics::gaussian_pdf;
use lindley_core::paradox::{evaluate, scan, Classification, MeasurementModel, Scenario};
use lindley_core::sim::{
    empirical_distribution_check, posterior_calibration, sample_model, Analytic, TruthGenerator,
};
use serde::Serialize;

use crate::config::{OutputFormat, RunConfig, MIN_TRIALS};
use crate::error::CliError;
use crate::output::{scan_to_csv, scan_to_json, scan_to_svg, write_atomic};

/// Flattened single-outcome report, shared by the text and JSON renderings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorOutput {
    pub scenario: &'static str,
    pub outcome: f64,
    pub sigma_units: f64,
    pub z_bar0: f64,
    pub bayes_factor: f64,
    pub log_bayes_factor: f64,
    pub pvalue: f64,
    pub classification: Classification,
    pub regime: OutcomeRegime,
}

impl PosteriorOutput {
    fn render_text(&self) -> String {
        let regime = match self.regime {
            OutcomeRegime::Continuous => "continuous",
            OutcomeRegime::Lattice => "lattice",
        };
        format!(
            "scenario: {}\noutcome: {}\nsigma_units: {:.6}\nz_bar0: {:.10}\nbayes_factor: {:.6e}\nlog_bayes_factor: {:.10}\npvalue: {:.6e}\nclassification: {}\nregime: {regime}\n",
            self.scenario,
            self.outcome,
            self.sigma_units,
            self.z_bar0,
            self.bayes_factor,
            self.log_bayes_factor,
            self.pvalue,
            self.classification,
        )
    }
}

pub fn posterior(cfg: &RunConfig) -> Result<String, CliError> {
    let scenario = cfg.spec.build()?;
    let outcome = match (cfg.outcome, cfg.sigma_units) {
        (Some(x), None) => x,
        (None, Some(t)) => scenario.outcome_at(t),
        (Some(_), Some(_)) => return Err(CliError::config("give either --outcome or --sigma-units, not both")),
        (None, None) => return Err(CliError::config("posterior needs --outcome or --sigma-units")),
    };
    let (region, report) = evaluate(&scenario, outcome, &cfg.settings)?;
    let out = PosteriorOutput {
        scenario: cfg.spec.kind.as_str(),
        outcome,
        sigma_units: region.sigma_units,
        z_bar0: region.z_bar0,
        bayes_factor: report.bayes_factor,
        log_bayes_factor: report.log_bayes_factor,
        pvalue: region.pvalue,
        classification: region.classification,
        regime: report.regime,
    };
    let text = match cfg.format.unwrap_or(OutputFormat::Text) {
        OutputFormat::Text => out.render_text(),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&out)
                .map_err(|e| CliError::Config(format!("json encoding failed: {e}")))?;
            s.push('\n');
            s
        }
        other => return Err(CliError::config(format!("posterior cannot render format '{other}'"))),
    };
    if let Some(path) = &cfg.output {
        write_atomic(path, text.as_bytes())?;
    }
    Ok(text)
}

/// Runs the scan and writes it; returns a one-line summary.
pub fn scan_command(cfg: &RunConfig) -> Result<String, CliError> {
    if cfg.axes.outcome_sigma.is_empty() {
        return Err(CliError::config("scan needs a non-empty outcome axis (axis_t)"));
    }
    let table = scan(&cfg.spec, &cfg.axes, &cfg.settings)?;
    let format = cfg.format.unwrap_or(OutputFormat::Csv);
    let bytes = match format {
        OutputFormat::Csv => scan_to_csv(&table)?,
        OutputFormat::Json => scan_to_json(&table)?,
        OutputFormat::Svg => scan_to_svg(&table),
        OutputFormat::Text => return Err(CliError::config("scan output format must be csv, json or svg")),
    };
    let path = cfg.output_path("scan", format);
    write_atomic(&path, &bytes)?;
    Ok(format!("wrote {} cells to {}\n", table.cells.len(), path.display()))
}

/// Outcome of one statistical check in the validation suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub scenario: &'static str,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render_text(&self) -> String {
        let mut s = format!("validate scenario={} trials={} seed={}\n", self.scenario, self.trials, self.seed);
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{tag} {}: {}", c.name, c.detail);
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(s, "validation: {} passed, {failed} failed", self.checks.len() - failed);
        s
    }
}

fn distribution_check(
    scenario: &Scenario,
    phase: f64,
    trials: usize,
    seed: u64,
    perturb: f64,
) -> Result<CheckResult, CliError> {
    let batch = sample_model(&scenario.model, phase, trials, seed)?;
    let check = match &scenario.model {
        MeasurementModel::Interferometer(cfg) if cfg.is_lattice() => {
            let (alpha, eta) = (cfg.alpha_mag(), cfg.efficiency * (1.0 - perturb));
            let pmf = move |d: i64| coherent_log_pmf(d, alpha, eta, phase).prob();
            empirical_distribution_check(&batch, &Analytic::Pmf(&pmf))?
        }
        model => {
            let m = model.moments(phase);
            let variance = m.variance * (1.0 + perturb);
            let pdf = move |x: f64| gaussian_pdf(x, m.mean, variance);
            let sd = m.std_dev();
            let analytic = Analytic::Pdf {
                pdf: &pdf,
                lo: m.mean - 5.0 * sd,
                hi: m.mean + 5.0 * sd,
                bins: 50,
            };
            empirical_distribution_check(&batch, &analytic)?
        }
    };
    Ok(CheckResult {
        name: format!("distribution(phase={phase:.6})"),
        passed: check.passes(),
        detail: format!(
            "max |freq error| = {:.3e}, chi2 = {:.2} (dof {}, 99.9% quantile {:.2})",
            check.max_abs_freq_error, check.chi_square_stat, check.dof, check.chi_square_critical
        ),
    })
}

fn moment_check(scenario: &Scenario, phase: f64, trials: usize, seed: u64) -> Result<CheckResult, CliError> {
    let batch = sample_model(&scenario.model, phase, trials, seed)?;
    let sample = batch.outcomes.moments();
    let model = scenario.model.moments(phase);
    let n = trials as f64;
    let se_mean = (model.variance / n).sqrt();
    // Gaussian standard error of the sample variance; the Skellam excess kurtosis is below 1/η|α|²
    let se_var = model.variance * (2.0 / n).sqrt() * 1.5;
    let z_mean = (sample.mean - model.mean).abs() / se_mean;
    let z_var = (sample.variance - model.variance).abs() / se_var;
    Ok(CheckResult {
        name: format!("moments(phase={phase:.6})"),
        passed: z_mean < 5.0 && z_var < 5.0,
        detail: format!(
            "mean {:.6} vs {:.6} ({z_mean:.2} se), variance {:.6} vs {:.6} ({z_var:.2} se)",
            sample.mean, model.mean, sample.variance, model.variance
        ),
    })
}

fn calibration_check(scenario: &Scenario, trials: usize, seed: u64, tol: f64) -> Result<CheckResult, CliError> {
    let table = posterior_calibration(trials, scenario, TruthGenerator::Prior, seed, tol)?;
    let counts: Vec<String> = table.bins.iter().map(|b| b.count.to_string()).collect();
    Ok(CheckResult {
        name: "calibration".to_string(),
        passed: table.passes(),
        detail: format!(
            "max per-decile |null fraction - mean posterior| = {:.4}, bin counts [{}]",
            table.max_error(1),
            counts.join(", ")
        ),
    })
}

/// Runs the Monte Carlo suite. `perturb` distorts the analytic laws the
/// samples are compared against; zero leaves them exact.
pub fn validate(cfg: &RunConfig, perturb: f64) -> Result<ValidationReport, CliError> {
    if cfg.trials < MIN_TRIALS {
        return Err(CliError::config(format!(
            "trials = {} is below the minimum of {MIN_TRIALS}",
            cfg.trials
        )));
    }
    let scenario = cfg.spec.build()?;
    let null = scenario.prior.null_value;
    let off_null = null + if null < PI / 2.0 { 0.5 } else { -0.5 };
    let seed = cfg.seed;
    let checks = vec![
        distribution_check(&scenario, null, cfg.trials, seed, perturb)?,
        distribution_check(&scenario, off_null, cfg.trials, seed.wrapping_add(1), perturb)?,
        moment_check(&scenario, null, cfg.trials, seed.wrapping_add(2))?,
        calibration_check(&scenario, cfg.trials, seed.wrapping_add(3), cfg.settings.tol)?,
    ];
    Ok(ValidationReport {
        scenario: cfg.spec.kind.as_str(),
        trials: cfg.trials,
        seed,
        checks,
    })
}

/// Renders and optionally writes the validation report; fails with exit code 1
/// if any check failed.
pub fn validate_command(cfg: &RunConfig, perturb: f64) -> Result<String, CliError> {
    let report = validate(cfg, perturb)?;
    let text = match cfg.format.unwrap_or(OutputFormat::Text) {
        OutputFormat::Text => report.render_text(),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Config(format!("json encoding failed: {e}")))?;
            s.push('\n');
            s
        }
        other => return Err(CliError::config(format!("validate cannot render format '{other}'"))),
    };
    if let Some(path) = &cfg.output {
        write_atomic(path, text.as_bytes())?;
    }
    if report.passed() {
        Ok(text)
    } else {
        print!("{text}");
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        Err(CliError::Validation(format!("failed checks: {}", failed.join(", "))))
    }
}
