use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(difgeo_cli::run(std::env::args_os()) as u8)
}
