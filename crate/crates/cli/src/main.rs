use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use nnverify_cli::{run, Cli, EXIT_ERROR};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            if let Some(json) = outcome.stdout {
                // a closed pipe is not an error worth reporting
                let _ = writeln!(std::io::stdout().lock(), "{json}");
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
