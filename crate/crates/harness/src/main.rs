use std::io::Write;
use std::process::ExitCode;

use drpa_harness::{cli, HarnessError};

fn main() -> ExitCode {
    let mut stdout = std::io::stdout().lock();
    let outcome = cli::run(std::env::args_os(), &mut stdout);
    let _ = stdout.flush();
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(HarnessError::Help(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
