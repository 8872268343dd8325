use std::process::ExitCode;

use clap::Parser;
use fracdyn::cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match fracdyn::run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fracdyn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
