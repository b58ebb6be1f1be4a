use std::process::ExitCode;

fn main() -> ExitCode {
    compactify::cli::main_exit(std::env::args_os())
}
