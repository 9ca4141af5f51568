//! `--config FILE` support: a TOML table of long-option names that fills in
//! flags the command line does not set.
//!
//! Keys use the option's long name (dashes or underscores). Values may be
//! strings, numbers, booleans, or arrays (joined with commas, for grids).
//! Explicit command-line flags always win; config entries for flags already
//! present are ignored.

use std::collections::HashSet;
use std::ffi::OsString;

pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(pos) = args.iter().position(|a| a == "--config") else {
        return Ok(args);
    };
    let path = args
        .get(pos + 1)
        .ok_or_else(|| "--config needs a file path".to_string())?
        .clone();
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| format!("config {} is not valid TOML: {e}", path.to_string_lossy()))?;

    let present: HashSet<String> = args
        .iter()
        .filter_map(|a| a.to_str())
        .filter(|a| a.starts_with("--"))
        .map(|a| a.trim_start_matches("--").replace('_', "-"))
        .collect();

    let mut out = args;
    let mut keys: Vec<&String> = table.keys().collect();
    keys.sort();
    for key in keys {
        let flag = key.replace('_', "-");
        if flag == "config" || present.contains(&flag) {
            continue;
        }
        let value = &table[key];
        match value {
            toml::Value::Boolean(true) => out.push(format!("--{flag}").into()),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                let joined = items
                    .iter()
                    .map(render_scalar)
                    .collect::<Result<Vec<_>, _>>()?
                    .join(",");
                out.push(format!("--{flag}").into());
                out.push(joined.into());
            }
            other => {
                out.push(format!("--{flag}").into());
                out.push(render_scalar(other)?.into());
            }
        }
    }
    Ok(out)
}

fn render_scalar(v: &toml::Value) -> Result<String, String> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        other => Err(format!("unsupported config value: {other}")),
    }
}
