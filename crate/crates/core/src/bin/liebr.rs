use std::process::ExitCode;

fn main() -> ExitCode {
    liebracket::cli::main_with_args(std::env::args_os())
}
