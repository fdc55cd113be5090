use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cmnb_cli::run(std::env::args_os()))
}
