use std::process::ExitCode;

use clap::Parser;
use pdm_cli::args::Cli;

fn main() -> ExitCode {
    match pdm_cli::run(Cli::parse()) {
        Ok(outcome) => {
            for n in outcome.notes {
                eprintln!("{n}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("pdm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
