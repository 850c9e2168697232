mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(&cli.common, &cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            // 3: the numerics failed on valid input; 2: the input was rejected
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
