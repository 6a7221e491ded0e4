use std::process::ExitCode;

fn main() -> ExitCode {
    bdnk::cli::main_with(std::env::args_os())
}
