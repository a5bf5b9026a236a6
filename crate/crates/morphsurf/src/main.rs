use std::process::ExitCode;

fn main() -> ExitCode {
    morphsurf::cli::main_entry(std::env::args())
}
