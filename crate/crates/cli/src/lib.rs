//! Command-line front end for `lindley-core`.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use args::{key_values, Cli, Command};
use config::RunConfig;
use error::CliError;

/// Executes a parsed command line and returns the text for standard output.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Posterior(a) => {
            let kv = key_values(
                &a.common,
                None,
                vec![("outcome", &a.outcome), ("sigma_units", &a.sigma_units)],
            )?;
            commands::posterior(&RunConfig::from_key_values(&kv)?)
        }
        Command::Scan(a) => {
            let kv = key_values(
                &a.common,
                a.preset.as_deref(),
                vec![
                    ("axis_t", &a.axis_t),
                    ("axis_eta", &a.axis_eta),
                    ("axis_alpha", &a.axis_alpha),
                    ("axis_prior_sigma", &a.axis_prior_sigma),
                ],
            )?;
            commands::scan_command(&RunConfig::from_key_values(&kv)?)
        }
        Command::Validate(a) => {
            let kv = key_values(&a.common, None, vec![("trials", &a.trials)])?;
            commands::validate_command(&RunConfig::from_key_values(&kv)?, a.perturb)
        }
    }
}
