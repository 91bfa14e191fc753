use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use cocycle_lab::{run, Cli, RunConfig, TOL_ENV};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            eprintln!("{}", rendered.lines().next().unwrap_or("error: invalid arguments"));
            return ExitCode::from(1);
        }
    };
    let env_tol = std::env::var(TOL_ENV).ok();
    let cfg = match RunConfig::from_cli(cli, env_tol.as_deref()) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };

    let outcome = run(&cfg);
    if outcome.status == 1 {
        eprintln!("{}", outcome.report);
        return ExitCode::from(1);
    }
    // Claim failures with no report body are diagnostics too.
    if outcome.report.starts_with("error:") {
        eprintln!("{}", outcome.report);
        return ExitCode::from(outcome.status as u8);
    }
    match &cfg.output_path {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.report) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{}", outcome.report),
    }
    ExitCode::from(outcome.status as u8)
}
