//! Flat `key = value` experiment manifests. Keys are the long flag names of
//! the chosen subcommand (or the global flags); flags given on the command
//! line win over file values.

use anyhow::{bail, Context, Result};
use clap::parser::ValueSource;
use clap::{ArgMatches, Command};
use std::collections::BTreeMap;
use std::path::Path;

const GLOBAL_KEYS: [&str; 3] = ["seed", "out", "format"];

pub fn parse(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected `key = value`", i + 1);
        };
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            bail!("line {}: empty key", i + 1);
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            bail!("line {}: duplicate key `{key}`", i + 1);
        }
    }
    Ok(map)
}

pub fn load(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse(&text).with_context(|| format!("in config {}", path.display()))
}

/// Extra argv entries that apply `config` to the invocation in `matches`.
/// Rejects keys that are not flags of the selected subcommand.
pub fn as_args(config: &BTreeMap<String, String>, root: &Command, matches: &ArgMatches) -> Result<Vec<String>> {
    let (mut cmd, mut leaf) = (root, matches);
    while let Some((name, sub)) = leaf.subcommand() {
        cmd = cmd.find_subcommand(name).expect("matched subcommand exists");
        leaf = sub;
    }
    let mut extra = Vec::new();
    for (key, value) in config {
        let (id, takes_value, given) = if GLOBAL_KEYS.contains(&key.as_str()) {
            (key.clone(), true, matches.value_source(key) == Some(ValueSource::CommandLine))
        } else {
            let Some(arg) = cmd.get_arguments().find(|a| a.get_long() == Some(key.as_str())) else {
                bail!("unknown config key `{key}` for `{}`", cmd.get_name());
            };
            let id = arg.get_id().to_string();
            let given = leaf.value_source(&id) == Some(ValueSource::CommandLine);
            (id, arg.get_action().takes_values(), given)
        };
        if given {
            continue;
        }
        if takes_value {
            extra.push(format!("--{key}"));
            extra.push(value.clone());
        } else {
            match value.as_str() {
                "true" => extra.push(format!("--{key}")),
                "false" => {}
                _ => bail!("config key `{key}` ({id}) is a switch: use true or false"),
            }
        }
    }
    Ok(extra)
}
