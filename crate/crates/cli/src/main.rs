use std::process::ExitCode;

use clap::Parser;
use tc_cli::{execute, Cli};

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tavis: {e}");
            e.exit_code()
        }
    }
}
