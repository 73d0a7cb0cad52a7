use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use vreglab_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) => {
            for m in &outcome.messages {
                eprintln!("{m}");
            }
            let written = match &cli.job.out {
                Some(path) => std::fs::write(path, &outcome.output).map_err(|e| e.to_string()),
                None => std::io::stdout().write_all(&outcome.output).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if outcome.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
