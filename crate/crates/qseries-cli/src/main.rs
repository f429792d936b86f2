use std::process::ExitCode;

fn main() -> ExitCode {
    qseries_cli::run_main()
}
