use std::process::ExitCode;

fn main() -> ExitCode {
    despeckle_cli::run(std::env::args_os())
}
