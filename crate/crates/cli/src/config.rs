//! Flag defaults from a TOML file.
//!
//! Top-level scalar keys become global flags; a `[<subcommand>]` table
//! supplies flags for that subcommand. Injected flags are placed before
//! the user's own, and since every flag overrides itself the command line
//! wins.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use toml::Value;

pub const SUBCOMMANDS: [&str; 7] = [
    "score",
    "effort",
    "traverse",
    "filter-candidates",
    "select",
    "correlate",
    "validate",
];

/// Global flags that take a value, needed to skip over it while scanning.
const VALUED_GLOBALS: [&str; 2] = ["--jobs", "--config"];

struct Scan {
    config: Option<OsString>,
    /// Index of the subcommand token.
    command: Option<usize>,
}

fn scan(args: &[OsString]) -> Scan {
    let mut out = Scan {
        config: None,
        command: None,
    };
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if let Some(v) = a.strip_prefix("--config=") {
            out.config = Some(v.into());
        } else if a == "--config" {
            out.config = args.get(i + 1).cloned();
            i += 1;
        } else if VALUED_GLOBALS.contains(&a.as_ref()) {
            i += 1;
        } else if SUBCOMMANDS.contains(&a.as_ref()) {
            out.command = Some(i);
            break;
        }
        i += 1;
    }
    out
}

fn to_flags(table: &toml::Table, out: &mut Vec<OsString>) -> Result<()> {
    for (key, value) in table {
        let flag = format!("--{key}");
        match value {
            Value::Boolean(true) => out.push(flag.into()),
            Value::Boolean(false) => {}
            Value::String(s) => {
                out.push(flag.into());
                out.push(s.into());
            }
            Value::Integer(n) => {
                out.push(flag.into());
                out.push(n.to_string().into());
            }
            Value::Float(x) => {
                out.push(flag.into());
                out.push(x.to_string().into());
            }
            Value::Array(items) => {
                let parts = items
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => Ok(s.clone()),
                        Value::Integer(n) => Ok(n.to_string()),
                        Value::Float(x) => Ok(x.to_string()),
                        other => bail!("config key `{key}`: unsupported list item {other}"),
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.push(flag.into());
                out.push(parts.join(",").into());
            }
            other => bail!("config key `{key}`: unsupported value {other}"),
        }
    }
    Ok(())
}

/// Expand `--config` into explicit flags. Arguments are returned untouched
/// when no config file is named.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let s = scan(&args);
    let Some(path) = s.config else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let doc: toml::Table = text
        .parse()
        .with_context(|| format!("parsing config {}", path.display()))?;

    let mut globals = toml::Table::new();
    for (k, v) in &doc {
        if v.is_table() {
            if !SUBCOMMANDS.contains(&k.as_str()) {
                bail!("config {}: unknown section [{k}]", path.display());
            }
        } else {
            globals.insert(k.clone(), v.clone());
        }
    }
    let mut global_flags = Vec::new();
    to_flags(&globals, &mut global_flags)?;

    let mut out = Vec::with_capacity(args.len() + 8);
    out.push(args[0].clone());
    out.extend(global_flags);
    match s.command {
        Some(ci) => {
            out.extend_from_slice(&args[1..=ci]);
            let name = args[ci].to_string_lossy().into_owned();
            if let Some(Value::Table(t)) = doc.get(&name) {
                to_flags(t, &mut out)?;
            }
            out.extend_from_slice(&args[ci + 1..]);
        }
        None => out.extend_from_slice(&args[1..]),
    }
    Ok(out)
}
