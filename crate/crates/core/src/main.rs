use std::io::Write;
use std::process::ExitCode;

use seminorm::cli::{configure_threads, run_command, EXIT_USAGE};

fn main() -> ExitCode {
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    let out = run_command(std::env::args_os());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(out.code as u8)
}
