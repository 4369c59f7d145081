use std::process::ExitCode;

fn main() -> ExitCode {
    scpaq::cli::run(std::env::args_os())
}
