use std::process::ExitCode;

fn main() -> ExitCode {
    lscode::cli::run(std::env::args_os())
}
