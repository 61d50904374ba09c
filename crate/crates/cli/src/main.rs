mod args;
mod conley;
mod detect;
mod equilibria;
mod portrait;
mod report;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use args::{Cli, Command, Format};
use report::CliError;

/// One-line JSON for text output.
pub(crate) fn to_json_compact<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("report types always serialize")
}

struct Output {
    command: &'static str,
    json: String,
    text: String,
    /// Printed after the report, selects the exit code.
    failure: Option<CliError>,
}

fn save(dir: &Path, command: &str, json: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let path = dir.join(format!("{command}.json"));
    fs::write(&path, json).map_err(|source| CliError::Io { path, source })
}

fn execute(cli: &Cli) -> Result<Output, CliError> {
    Ok(match &cli.command {
        Command::Equilibria(a) => {
            let b = equilibria::run(a)?;
            Output { command: "equilibria", json: b.to_json(), text: equilibria::text(&b), failure: None }
        }
        Command::Portrait(a) => {
            let dir = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            let b = portrait::run(a, &dir)?;
            Output { command: "portrait", json: b.to_json(), text: portrait::text(&b, &dir), failure: None }
        }
        Command::Detect(a) => {
            let r = detect::run(a)?;
            let failure = (!r.failures.is_empty()).then(|| CliError::Numerical(r.failures.join("; ")));
            Output { command: "detect", json: r.bundle.to_json(), text: detect::text(&r.bundle), failure }
        }
        Command::Conley(a) => {
            let r = conley::run(a)?;
            let failure = r.rejection.map(CliError::Input);
            Output { command: "conley", json: r.bundle.to_json(), text: conley::text(&r.bundle), failure }
        }
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let out = execute(cli)?;
    // portrait always writes its manifest; the others save only on request
    if let (Some(dir), false) = (&cli.out_dir, out.command == "portrait") {
        save(dir, out.command, &out.json)?;
    }
    match cli.format {
        Format::Json => print!("{}", out.json),
        Format::Text => print!("{}", out.text),
    }
    out.failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vdp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
