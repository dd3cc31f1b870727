//! Run configuration: a flat `key = value` file, overridden by command-line flags.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment            (anything after '#' is ignored)
//! key = value
//! ```
//!
//! Keys are case-sensitive, may appear once, and unknown keys are an error.
//! Angles are in radians. Axis values are either a comma list (`0.5, 0.7`)
//! or an inclusive range `start:stop:step`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lindley_core::mz::VarianceVariant;
use lindley_core::paradox::{linear_grid, ModelKind, PriorShape, ScanAxes, ScenarioSpec, Sidedness, TestSettings};

use crate::error::CliError;

/// Every key accepted in a config file, with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("scenario", "homodyne | mz-coherent | mz-squeezed"),
    ("alpha", "coherent amplitude |alpha|"),
    ("squeeze", "squeezing magnitude r"),
    ("squeeze_phase", "squeezing phase (radians)"),
    ("eta", "detector quantum efficiency in (0, 1]"),
    ("phi0", "phase asserted by the null hypothesis (radians)"),
    ("z0", "prior probability of the null hypothesis"),
    ("prior", "flat | wrapped-normal"),
    ("prior_sigma", "wrapped-normal width (radians)"),
    ("interval_lo", "lower end of the phase interval (radians)"),
    ("interval_hi", "upper end of the phase interval (radians)"),
    ("alpha_freq", "significance level of the frequentist test"),
    ("sidedness", "two-sided | one-sided"),
    ("variance_variant", "as-printed | consistent"),
    ("sigma_phase", "phase at which sigma_d is evaluated for sigma units"),
    ("tol", "relative quadrature tolerance"),
    ("format", "csv | json | svg (scan); text | json (posterior, validate)"),
    ("output", "output file path"),
    ("seed", "64-bit seed for stochastic commands"),
    ("trials", "Monte Carlo trials for validate"),
    ("outcome", "observed outcome for posterior"),
    ("sigma_units", "outcome given as sigma units above the null mean"),
    ("axis_t", "scan axis: outcome offset in sigma units"),
    ("axis_eta", "scan axis: efficiency"),
    ("axis_alpha", "scan axis: |alpha|"),
    ("axis_prior_sigma", "scan axis: wrapped-normal prior width"),
];

/// Environment variable naming the default directory for output files.
pub const OUT_DIR_ENV: &str = "LINDLEY_OUT_DIR";

pub const DEFAULT_TRIALS: usize = 100_000;
pub const MIN_TRIALS: usize = 10_000;
pub const DEFAULT_SEED: u64 = 1;

pub type KeyValues = BTreeMap<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
    Svg,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Text => "txt",
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Svg => "svg",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(format!("unknown format '{other}'")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Text => "text",
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Svg => "svg",
        })
    }
}

/// Frozen scan configurations for the standard figure families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig3,
    Fig4,
    Fig5,
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            "fig5" => Ok(Preset::Fig5),
            other => Err(format!("unknown preset '{other}' (expected fig3, fig4 or fig5)")),
        }
    }
}

impl Preset {
    pub fn entries(&self) -> &'static [(&'static str, &'static str)] {
        match self {
            // coherent light, diffuse prior; |alpha| slices at eta = 0.7 and eta slices at n = 100
            Preset::Fig3 => &[
                ("scenario", "mz-coherent"),
                ("z0", "0.99"),
                ("prior", "flat"),
                ("axis_t", "0:6:0.05"),
                ("axis_eta", "0.5,0.7,0.9"),
                ("axis_alpha", "5,10,20"),
            ],
            // coherent light, wrapped-normal prior over (d, sigma)
            Preset::Fig4 => &[
                ("scenario", "mz-coherent"),
                ("z0", "0.99"),
                ("alpha", "10"),
                ("axis_t", "0:6:0.1"),
                ("axis_eta", "0.5,0.7"),
                ("axis_prior_sigma", "0.05:2:0.05"),
            ],
            // squeezed light, sigma_d taken at phi = 0
            Preset::Fig5 => &[
                ("scenario", "mz-squeezed"),
                ("z0", "0.99"),
                ("alpha", "10"),
                ("squeeze", "1"),
                ("squeeze_phase", "3.141592653589793"),
                ("prior", "flat"),
                ("sigma_phase", "0"),
                ("axis_t", "0:6:0.05"),
                ("axis_eta", "0.5:1:0.1"),
            ],
        }
    }

    pub fn key_values(&self) -> KeyValues {
        self.entries()
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }
}

/// Fully validated configuration for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: ScenarioSpec,
    pub settings: TestSettings,
    pub format: Option<OutputFormat>,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub trials: usize,
    pub outcome: Option<f64>,
    pub sigma_units: Option<f64>,
    pub axes: ScanAxes,
}

fn is_known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

/// Parses config-file text into key/value pairs.
pub fn parse_key_values(text: &str, origin: &str) -> Result<KeyValues, CliError> {
    let mut out = KeyValues::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("{origin}:{lineno}: expected 'key = value'")))?;
        let (key, value) = (key.trim(), value.trim());
        if !is_known(key) {
            return Err(CliError::config(format!("{origin}:{lineno}: unknown key '{key}'")));
        }
        if value.is_empty() {
            return Err(CliError::config(format!("{origin}:{lineno}: key '{key}' has no value")));
        }
        if out.insert(key.to_string(), value.to_string()).is_some() {
            return Err(CliError::config(format!("{origin}:{lineno}: duplicate key '{key}'")));
        }
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<KeyValues, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_key_values(&text, &path.display().to_string())
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::config(format!("{key} = '{value}' is not a valid number")))
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    let x: f64 = parse_num(key, value)?;
    if !x.is_finite() {
        return Err(CliError::config(format!("{key} = '{value}' must be finite")));
    }
    Ok(x)
}

/// A comma list or an inclusive `start:stop:step` range.
pub fn parse_axis(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = value.split(':').map(str::trim).collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (a, b, h) = (parse_f64(key, start)?, parse_f64(key, stop)?, parse_f64(key, step)?);
            if h <= 0.0 || b < a {
                return Err(CliError::config(format!(
                    "{key} = '{value}': range needs start <= stop and a positive step"
                )));
            }
            linear_grid(a, b, h)
        }
        [_] => value
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| parse_f64(key, s))
            .collect::<Result<Vec<_>, _>>()?,
        _ => {
            return Err(CliError::config(format!(
                "{key} = '{value}': expected a comma list or start:stop:step"
            )))
        }
    };
    if values.is_empty() {
        return Err(CliError::config(format!("{key} axis is empty")));
    }
    Ok(values)
}

impl RunConfig {
    /// Builds and validates a configuration from merged key/value pairs.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self, CliError> {
        for key in kv.keys() {
            if !is_known(key) {
                return Err(CliError::config(format!("unknown key '{key}'")));
            }
        }
        let get = |k: &str| kv.get(k).map(String::as_str);

        let kind: ModelKind = match get("scenario") {
            Some(s) => s.parse().map_err(CliError::Config)?,
            None => ModelKind::Homodyne,
        };
        let mut spec = ScenarioSpec::default_for(kind);
        let mut settings = TestSettings::default();

        if let Some(v) = get("alpha") {
            spec.alpha_mag = parse_f64("alpha", v)?;
        }
        if let Some(v) = get("squeeze") {
            spec.squeeze_mag = parse_f64("squeeze", v)?;
        }
        if let Some(v) = get("squeeze_phase") {
            spec.squeeze_phase = parse_f64("squeeze_phase", v)?;
        }
        if let Some(v) = get("eta") {
            spec.efficiency = parse_f64("eta", v)?;
        }
        if let Some(v) = get("phi0") {
            spec.null_value = parse_f64("phi0", v)?;
        }
        if let Some(v) = get("z0") {
            spec.z0 = parse_f64("z0", v)?;
        }
        if let Some(v) = get("interval_lo") {
            spec.interval.0 = parse_f64("interval_lo", v)?;
        }
        if let Some(v) = get("interval_hi") {
            spec.interval.1 = parse_f64("interval_hi", v)?;
        }
        let prior_sigma = get("prior_sigma").map(|v| parse_f64("prior_sigma", v)).transpose()?;
        spec.prior = match (get("prior"), prior_sigma) {
            (None | Some("flat"), None) => PriorShape::Flat,
            (Some("flat"), Some(_)) => {
                return Err(CliError::config("prior_sigma is only meaningful with prior = wrapped-normal"))
            }
            (None | Some("wrapped-normal"), Some(sigma)) => PriorShape::WrappedNormal { sigma },
            (Some("wrapped-normal"), None) => {
                return Err(CliError::config("prior = wrapped-normal needs prior_sigma"))
            }
            (Some(other), _) => {
                return Err(CliError::config(format!(
                    "prior = '{other}' (expected flat or wrapped-normal)"
                )))
            }
        };
        if let Some(v) = get("variance_variant") {
            spec.variance_variant = match v {
                "as-printed" => VarianceVariant::AsPrinted,
                "consistent" => VarianceVariant::Consistent,
                other => {
                    return Err(CliError::config(format!(
                        "variance_variant = '{other}' (expected as-printed or consistent)"
                    )))
                }
            };
        }
        if let Some(v) = get("sigma_phase") {
            spec.sigma_phase = Some(parse_f64("sigma_phase", v)?);
        }
        if let Some(v) = get("alpha_freq") {
            settings.alpha_freq = parse_f64("alpha_freq", v)?;
        }
        if let Some(v) = get("sidedness") {
            settings.sidedness = match v {
                "two-sided" => Sidedness::TwoSided,
                "one-sided" => Sidedness::OneSided,
                other => {
                    return Err(CliError::config(format!(
                        "sidedness = '{other}' (expected two-sided or one-sided)"
                    )))
                }
            };
        }
        if let Some(v) = get("tol") {
            settings.tol = parse_f64("tol", v)?;
        }

        let format = get("format").map(|v| v.parse().map_err(CliError::Config)).transpose()?;
        let output = get("output").map(PathBuf::from);
        let seed = get("seed").map(|v| parse_num::<u64>("seed", v)).transpose()?.unwrap_or(DEFAULT_SEED);
        let trials = get("trials")
            .map(|v| parse_num::<usize>("trials", v))
            .transpose()?
            .unwrap_or(DEFAULT_TRIALS);
        let outcome = get("outcome").map(|v| parse_f64("outcome", v)).transpose()?;
        let sigma_units = get("sigma_units").map(|v| parse_f64("sigma_units", v)).transpose()?;

        let axis = |k: &str| get(k).map(|v| parse_axis(k, v)).transpose();
        let axes = ScanAxes {
            outcome_sigma: axis("axis_t")?.unwrap_or_default(),
            efficiency: axis("axis_eta")?,
            alpha_mag: axis("axis_alpha")?,
            prior_sigma: axis("axis_prior_sigma")?,
        };

        // re-run every model invariant now rather than at first use
        spec.build()?;
        settings.validate()?;
        for &eta in axes.efficiency.iter().flatten() {
            ScenarioSpec { efficiency: eta, ..spec }.build()?;
        }
        for &alpha in axes.alpha_mag.iter().flatten() {
            ScenarioSpec { alpha_mag: alpha, ..spec }.build()?;
        }
        for &sigma in axes.prior_sigma.iter().flatten() {
            ScenarioSpec {
                prior: PriorShape::WrappedNormal { sigma },
                ..spec
            }
            .build()?;
        }

        Ok(RunConfig {
            spec,
            settings,
            format,
            output,
            seed,
            trials,
            outcome,
            sigma_units,
            axes,
        })
    }

    /// Output path: explicit `output`, else `<$LINDLEY_OUT_DIR or .>/<stem>.<ext>`.
    pub fn output_path(&self, stem: &str, format: OutputFormat) -> PathBuf {
        if let Some(p) = &self.output {
            return p.clone();
        }
        let dir = std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."));
        dir.join(format!("{stem}.{}", format.extension()))
    }
}

/// Layers key/value sources; later layers win.
pub fn merge(layers: impl IntoIterator<Item = KeyValues>) -> KeyValues {
    let mut out = KeyValues::new();
    for layer in layers {
        out.extend(layer);
    }
    out
}
