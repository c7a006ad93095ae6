//! Command-line surface over `pdm_core`: family listing, grid evaluation, verification
//! reports, V_m curves and ordering comparisons, written as CSV or JSON.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod figure;
pub mod table;

use args::Cli;
use commands::Outcome;
use config::RunConfig;
use error::CliResult;

/// Loads the config file, validates, then executes.
pub fn run(cli: Cli) -> CliResult<Outcome> {
    let (kind, flags) = cli.command.split();
    let options = config::load(flags)?;
    let cfg = RunConfig::resolve(kind, options)?;
    commands::execute(&cfg)
}
