//! `--config` support. A config is a table of flag values: shared flags at
//! the top level, `command = "<name>"`, and the subcommand's flags under a
//! table of the same name. It is turned back into arguments placed before
//! the command-line ones, so explicit flags win.

use std::ffi::OsString;
use std::path::Path;

use serde_json::{Map, Value};

use crate::args::COMMAND_NAMES;
use crate::error::{CliError, Result};

/// Shared flags that take a value.
const VALUED: [&str; 5] = ["--seed", "--threads", "--out", "--format", "--config"];

/// Keys of the shared flags allowed in a config.
const SHARED_KEYS: [&str; 3] = ["seed", "threads", "format"];

/// Read a config: TOML, JSON, or an earlier output whose first line is a
/// `#`-prefixed header carrying `provenance.config`.
pub fn load(path: &Path) -> Result<Map<String, Value>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let where_ = path.display();
    let value: Value = if let Some(first) = text.lines().next().and_then(|l| l.strip_prefix('#')) {
        let head: Value =
            serde_json::from_str(first.trim()).map_err(|e| CliError::Config(format!("{where_}: header: {e}")))?;
        head.pointer("/provenance/config")
            .cloned()
            .ok_or_else(|| CliError::Config(format!("{where_}: header has no provenance.config")))?
    } else if text.trim_start().starts_with('{') {
        let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{where_}: {e}")))?;
        doc.pointer("/provenance/config").cloned().unwrap_or(doc)
    } else {
        let t: toml::Value = toml::from_str(&text).map_err(|e| CliError::Config(format!("{where_}: {e}")))?;
        serde_json::to_value(t).map_err(|e| CliError::Config(format!("{where_}: {e}")))?
    };
    match value {
        Value::Object(m) => Ok(m),
        _ => Err(CliError::Config(format!("{where_}: config must be a table"))),
    }
}

fn scalar(key: &str, v: &Value) -> Result<Vec<String>> {
    let flag = format!("--{key}");
    Ok(match v {
        Value::Null | Value::Bool(false) => vec![],
        Value::Bool(true) => vec![flag],
        Value::Number(n) => vec![flag, n.to_string()],
        Value::String(s) => vec![flag, s.clone()],
        Value::Array(items) if items.is_empty() => vec![],
        Value::Array(items) => {
            let parts: Result<Vec<String>> = items
                .iter()
                .map(|i| match i {
                    Value::Number(n) => Ok(n.to_string()),
                    Value::String(s) => Ok(s.clone()),
                    _ => Err(CliError::Config(format!("'{key}': list items must be numbers or strings"))),
                })
                .collect();
            vec![flag, parts?.join(",")]
        }
        Value::Object(_) => return Err(CliError::Config(format!("'{key}': nested tables are not flags"))),
    })
}

/// Position of the subcommand among raw arguments (program name excluded).
fn command_position(args: &[OsString]) -> Option<usize> {
    let mut k = 0;
    while k < args.len() {
        let a = args[k].to_string_lossy();
        if VALUED.contains(&a.as_ref()) {
            k += 2;
            continue;
        }
        if !a.starts_with('-') {
            return Some(k);
        }
        k += 1;
    }
    None
}

/// Value of `--config` among raw arguments.
pub fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

/// Full argument vector: program, subcommand, config flags, then the
/// remaining command-line flags.
pub fn merge(args: Vec<OsString>, config: &Map<String, Value>) -> Result<Vec<OsString>> {
    let (program, rest) = args.split_first().ok_or_else(|| CliError::Config("empty argument list".into()))?;
    let mut rest = rest.to_vec();
    let from_cli = command_position(&rest).map(|k| rest.remove(k).to_string_lossy().into_owned());
    let from_config = match config.get("command") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(CliError::Config("'command' must be a string".into())),
    };
    let command = match (from_cli, from_config) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::Config(format!("command '{a}' does not match config command '{b}'")))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(CliError::Config("no command given".into())),
    };
    let mut out = vec![program.clone(), command.clone().into()];
    for (key, v) in config {
        if key == "command" || COMMAND_NAMES.contains(&key.as_str()) {
            continue;
        }
        if !SHARED_KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("unknown top-level key '{key}'")));
        }
        out.extend(scalar(key, v)?.into_iter().map(OsString::from));
    }
    match config.get(&command) {
        None => {}
        Some(Value::Object(flags)) => {
            for (key, v) in flags {
                out.extend(scalar(key, v)?.into_iter().map(OsString::from));
            }
        }
        Some(_) => return Err(CliError::Config(format!("'{command}' must be a table"))),
    }
    out.extend(rest);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn config_flags_precede_command_line_flags() {
        let cfg: Map<String, Value> = serde_json::from_str(
            r#"{"seed": 5, "command": "popdyn", "popdyn": {"p": 0.1, "continuous": true, "generations": [3, 4]}}"#,
        )
        .unwrap();
        let merged = merge(os(&["tc", "--seed", "9", "popdyn", "-p", "0.2"]), &cfg).unwrap();
        assert_eq!(
            merged,
            os(&[
                "tc",
                "popdyn",
                "--seed",
                "5",
                "--continuous",
                "--generations",
                "3,4",
                "--p",
                "0.1",
                "--seed",
                "9",
                "-p",
                "0.2"
            ])
        );
    }

    #[test]
    fn mismatched_commands_are_rejected() {
        let cfg: Map<String, Value> = serde_json::from_str(r#"{"command": "bell"}"#).unwrap();
        assert!(matches!(merge(os(&["tc", "flow"]), &cfg), Err(CliError::Config(_))));
        assert!(matches!(merge(os(&["tc"]), &Map::new()), Err(CliError::Config(_))));
    }
}
