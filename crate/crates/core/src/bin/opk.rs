use std::process::ExitCode;

fn main() -> ExitCode {
    szasz_charlier::cli::main_with_args(std::env::args_os())
}
