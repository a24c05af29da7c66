use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(dampwave::cli::main_with(std::env::args_os()))
}
