use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use costspace::cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(CliError::OUTPUT as u8);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("costspace: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
