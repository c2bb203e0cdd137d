use std::process::ExitCode;

fn main() -> ExitCode {
    holoep::cli::main_with_args(std::env::args_os())
}
