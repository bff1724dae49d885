//! Command-line front end. Each run writes a table with a `#`-prefixed JSON
//! header holding the full configuration, seed and version.

mod args;
mod commands;
mod config;
mod error;
mod output;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command};
use error::{CliError, Result};

/// The settings needed to repeat a run. Thread count and output paths are
/// left out: they do not change the numbers.
fn provenance(cli: &Cli) -> Result<Value> {
    let name = cli.command.name();
    let flags = serde_json::to_value(&cli.command).map_err(|e| CliError::Config(e.to_string()))?;
    let flags = match flags {
        Value::Object(m) => Value::Object(m.into_iter().filter(|(_, v)| !v.is_null()).collect()),
        other => other,
    };
    let mut config = json!({ "command": name, "seed": cli.seed, "format": cli.format });
    config[name] = flags;
    Ok(json!({ "tool": "treecode", "version": env!("CARGO_PKG_VERSION"), "seed": cli.seed, "config": config }))
}

fn run(cli: &Cli) -> Result<()> {
    let seed = cli.seed;
    let report = treecode::par::with_threads(cli.threads, || match &cli.command {
        Command::Distance(a) => commands::distance(a, seed),
        Command::Search(a) => commands::search(a),
        Command::Classify(a) => commands::classify(a),
        Command::Flow(a) => commands::flow(a),
        Command::Bell(a) => commands::bell_cmd(a, seed),
        Command::Popdyn(a) => commands::popdyn(a, seed),
        Command::Sample(a) => commands::sample(a, seed),
        Command::Enumerate(a) => commands::enumerate(a),
    })?;
    output::emit(&report, &provenance(cli)?, cli.format, cli.out.as_deref())
}

fn parse() -> Result<Cli> {
    let raw: Vec<OsString> = std::env::args_os().collect();
    let argv = match config::config_path(&raw[1..]) {
        Some(path) => config::merge(raw, &config::load(path.as_ref())?)?,
        None => raw,
    };
    Ok(Cli::parse_from(argv))
}

fn main() -> ExitCode {
    let outcome = parse().and_then(|cli| run(&cli));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
