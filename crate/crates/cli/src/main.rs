use std::process::ExitCode;

use clap::Parser;
use symbounds_cli::{emit, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        for w in &out.warnings {
            eprintln!("warning: {w}");
        }
        emit(&out)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, symbounds_cli::CliError::Validation { .. }) {
                eprintln!("\nFor more information, try '--help'.");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
