use std::process::ExitCode;

use clap::Parser;
use nhspec_cli::{execute, resolve, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("nhspec: {e}");
            return ExitCode::from(2);
        }
    };
    let mut stdout = std::io::stdout().lock();
    match execute(&cfg, &mut stdout) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("nhspec: {}: a tolerance check failed", cfg.command);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("nhspec: {e}");
            ExitCode::from(2)
        }
    }
}
