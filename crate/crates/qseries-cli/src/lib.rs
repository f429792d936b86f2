//! Library surface of the `qseries` command-line tool, split out so the
//! golden-fixture tests can drive jobs in-process.

pub mod expr;
pub mod jobs;

use std::process::ExitCode;

use clap::Parser;

pub use jobs::{run_job, Cli, JobError, JobOutput};

pub fn run_main() -> ExitCode {
    let cli = Cli::parse();
    match run_job(&cli) {
        Ok(output) => {
            print!("{}", output.stdout);
            ExitCode::from(0)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
