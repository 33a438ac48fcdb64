use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    catvisc_cli::run(catvisc_cli::Cli::parse())
}
