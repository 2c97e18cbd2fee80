use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = lpcocycle_cli::cli::Cli::parse();
    match lpcocycle_cli::run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
