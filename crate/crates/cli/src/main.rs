use std::process::ExitCode;

fn main() -> ExitCode {
    awarekit_cli::main_entry()
}
