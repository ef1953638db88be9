//! `ufg`: union-free generic depth from the command line.

mod args;
mod commands;
mod kinds;

use std::process::ExitCode;

use serde_json::json;

use args::Parsed;
use ufg_core::UfgError;

fn report(e: &UfgError) {
    let mut err = json!({"kind": e.kind(), "message": e.to_string()});
    if let Some(line) = e.line() {
        err["line"] = json!(line);
    }
    eprintln!("{}", json!({"schema_version": commands::SCHEMA_VERSION, "error": err}));
}

fn main() -> ExitCode {
    let result = args::parse(std::env::args_os().collect()).and_then(|p| match p {
        Parsed::Exit(e) => {
            let _ = e.print();
            Ok(())
        }
        Parsed::Run(cli) => commands::dispatch(&cli.verb),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::FAILURE
        }
    }
}
