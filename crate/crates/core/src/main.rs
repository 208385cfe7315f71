use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use maxdist::cli::{run_file, Cli};

fn main() -> ExitCode {
    let (config, path) = Cli::parse().command.into_parts();
    let mut buf = Vec::new();
    let code = match run_file(&config, &path, &mut buf) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    // Output only on success, so a failed run never leaves partial reports.
    if code == 0 {
        let mut stdout = std::io::stdout().lock();
        if stdout.write_all(&buf).and_then(|()| stdout.flush()).is_err() {
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code as u8)
}
