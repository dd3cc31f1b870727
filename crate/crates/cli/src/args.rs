//! Command-line flags. Every config-file key has a matching `--kebab-case`
//! flag; flags override the file, which overrides presets and defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{merge, read_config_file, KeyValues, Preset};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "lindley-interf",
    version,
    about = "Bayesian vs frequentist tests of optical phase shifts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Posterior probability of the null, p-value and verdict for one outcome.
    Posterior(PosteriorArgs),
    /// Evaluate a grid of outcomes and parameters and write a table or plot.
    Scan(ScanArgs),
    /// Monte Carlo checks of the analytic laws and of posterior calibration.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// homodyne | mz-coherent | mz-squeezed
    #[arg(long)]
    pub scenario: Option<String>,
    /// Coherent amplitude |alpha|.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Squeezing magnitude r.
    #[arg(long)]
    pub squeeze: Option<String>,
    /// Squeezing phase in radians.
    #[arg(long)]
    pub squeeze_phase: Option<String>,
    /// Detector quantum efficiency.
    #[arg(long)]
    pub eta: Option<String>,
    /// Null-hypothesis phase in radians.
    #[arg(long)]
    pub phi0: Option<String>,
    /// Prior probability of the null.
    #[arg(long)]
    pub z0: Option<String>,
    /// flat | wrapped-normal
    #[arg(long)]
    pub prior: Option<String>,
    /// Wrapped-normal prior width in radians.
    #[arg(long)]
    pub prior_sigma: Option<String>,
    /// Lower end of the phase interval in radians
    #[arg(long)]
    pub interval_lo: Option<String>,
    /// Upper end of the phase interval in radians
    #[arg(long)]
    pub interval_hi: Option<String>,
    /// Significance level of the frequentist test.
    #[arg(long)]
    pub alpha_freq: Option<String>,
    /// two-sided | one-sided
    #[arg(long)]
    pub sidedness: Option<String>,
    /// as-printed | consistent
    #[arg(long)]
    pub variance_variant: Option<String>,
    /// Phase at which sigma_d is evaluated for sigma units.
    #[arg(long)]
    pub sigma_phase: Option<String>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    pub tol: Option<String>,
    /// Output format.
    #[arg(long)]
    pub format: Option<String>,
    /// Output file.
    #[arg(long)]
    pub output: Option<String>,
    /// Seed for stochastic commands.
    #[arg(long)]
    pub seed: Option<String>,
}

impl CommonArgs {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("scenario", &self.scenario),
            ("alpha", &self.alpha),
            ("squeeze", &self.squeeze),
            ("squeeze_phase", &self.squeeze_phase),
            ("eta", &self.eta),
            ("phi0", &self.phi0),
            ("z0", &self.z0),
            ("prior", &self.prior),
            ("prior_sigma", &self.prior_sigma),
            ("interval_lo", &self.interval_lo),
            ("interval_hi", &self.interval_hi),
            ("alpha_freq", &self.alpha_freq),
            ("sidedness", &self.sidedness),
            ("variance_variant", &self.variance_variant),
            ("sigma_phase", &self.sigma_phase),
            ("tol", &self.tol),
            ("format", &self.format),
            ("output", &self.output),
            ("seed", &self.seed),
        ]
    }
}

#[derive(Debug, Args)]
pub struct PosteriorArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Observed outcome (quadrature value or photocount difference).
    #[arg(long, allow_hyphen_values = true)]
    pub outcome: Option<String>,
    /// Outcome as sigma units above the null mean.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma_units: Option<String>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// fig3 | fig4 | fig5
    #[arg(long)]
    pub preset: Option<String>,
    /// Outcome offsets in sigma units: list `a,b,c` or range `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub axis_t: Option<String>,
    /// Efficiency axis
    #[arg(long)]
    pub axis_eta: Option<String>,
    /// |alpha| axis
    #[arg(long)]
    pub axis_alpha: Option<String>,
    /// Wrapped-normal prior width axis
    #[arg(long)]
    pub axis_prior_sigma: Option<String>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Monte Carlo trials per check (at least 10000).
    #[arg(long)]
    pub trials: Option<String>,
    /// Relative distortion applied to the analytic laws (harness self-test).
    #[arg(long, hide = true, default_value_t = 0.0)]
    pub perturb: f64,
}

fn flag_layer<'a>(pairs: impl IntoIterator<Item = (&'static str, &'a Option<String>)>) -> KeyValues {
    pairs
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
        .collect()
}

/// Defaults < preset < config file < flags.
pub fn key_values(
    common: &CommonArgs,
    preset: Option<&str>,
    extra: Vec<(&'static str, &Option<String>)>,
) -> Result<KeyValues, CliError> {
    let preset = preset
        .map(|p| p.parse::<Preset>().map_err(CliError::Config))
        .transpose()?
        .map(|p| p.key_values())
        .unwrap_or_default();
    let file = common
        .config
        .as_deref()
        .map(read_config_file)
        .transpose()?
        .unwrap_or_default();
    let mut flags = common.pairs();
    flags.extend(extra);
    Ok(merge([preset, file, flag_layer(flags)]))
}
