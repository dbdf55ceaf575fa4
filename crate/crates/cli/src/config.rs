//! Flat TOML run files. Each key is a long flag name of the chosen
//! subcommand (or a global flag); values are spliced into argv ahead of the
//! command-line flags so that the latter win.

use std::path::Path;

use clap::CommandFactory;
use gxtr_core::{Error, Result};

use crate::args::Cli;

const GLOBAL_KEYS: [&str; 5] = ["json", "workers", "seed", "out", "format"];

pub fn load(path: &Path) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    text.parse::<toml::Table>()
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Turn `table` into flags for `subcommand`, rejecting unknown keys and
/// nested values.
pub fn to_flags(table: &toml::Table, subcommand: &str) -> Result<Vec<String>> {
    let cmd = Cli::command();
    let sub = cmd
        .find_subcommand(subcommand)
        .ok_or_else(|| Error::Config(format!("unknown subcommand '{subcommand}'")))?;
    let mut flags = Vec::new();
    for (key, value) in table {
        let long = key.replace('_', "-");
        if long == "subcommand" {
            match value.as_str() {
                Some(s) if s == subcommand => continue,
                _ => {
                    return Err(Error::Config(format!(
                        "config is for subcommand {value}, not '{subcommand}'"
                    )))
                }
            }
        }
        let known = GLOBAL_KEYS.contains(&long.as_str())
            || sub.get_arguments().any(|a| a.get_long() == Some(long.as_str()));
        if !known || long == "config" {
            return Err(Error::Config(format!("unknown key '{key}' for '{subcommand}'")));
        }
        let flag = format!("--{long}");
        match value {
            toml::Value::Boolean(true) => flags.push(flag),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                if long == "constant" {
                    for item in items {
                        flags.push(flag.clone());
                        flags.push(scalar(key, item)?);
                    }
                } else {
                    let parts = items.iter().map(|v| scalar(key, v)).collect::<Result<Vec<_>>>()?;
                    flags.push(flag);
                    flags.push(parts.join(","));
                }
            }
            v => {
                flags.push(flag);
                flags.push(scalar(key, v)?);
            }
        }
    }
    Ok(flags)
}

fn scalar(key: &str, v: &toml::Value) -> Result<String> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        _ => Err(Error::Config(format!("key '{key}' must hold a scalar or a flat array"))),
    }
}
