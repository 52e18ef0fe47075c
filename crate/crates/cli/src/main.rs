mod commands;
mod config;
mod output;
mod render;

use std::process::ExitCode;

use clap::Parser;

use config::{init_threads, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| commands::dispatch(cli.command));
    match result {
        Ok(report) => {
            for c in &report.checks {
                println!("{} {}: {}", if c.pass { "ok  " } else { "FAIL" }, c.name, c.measured);
            }
            for n in &report.notes {
                println!("note: {n}");
            }
            println!("{}: {} artifacts in {}", report.status, report.artifacts.len(), report.output_dir.display());
            if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(4) }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
