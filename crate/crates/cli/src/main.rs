use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(kthprice_cli::run(std::env::args_os()))
}
