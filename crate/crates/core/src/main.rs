use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use cmred::cli::{execute, Cli};

fn main() -> ExitCode {
    let outcome = execute(Cli::parse());
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(outcome.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(1);
    }
    for line in &outcome.stderr {
        eprintln!("{line}");
    }
    ExitCode::from(outcome.code as u8)
}
