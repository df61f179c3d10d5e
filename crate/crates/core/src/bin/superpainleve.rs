use std::process::ExitCode;

use clap::Parser;
use superpainleve::cli::{run, RunConfig, EXIT_USAGE};

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let out = run(&cfg);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out.report) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE as u8);
            }
        }
        None if out.code == EXIT_USAGE => eprint!("{}", out.report),
        None => print!("{}", out.report),
    }
    ExitCode::from(out.code as u8)
}
