use std::process::ExitCode;

use clap::Parser;

use scale_smooth::commands;
use scale_smooth::config::{Cli, RunConfig, SEED_ENV};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = RunConfig::from_cli(cli, std::env::var(SEED_ENV).ok())
        .and_then(|cfg| commands::run(&cfg, &mut std::io::stderr()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
