use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(projlab::cli::run_cli(std::env::args_os()))
}
