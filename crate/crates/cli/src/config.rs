//! Flat `section.key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! data.features = out/features.csv
//! model.circuit = SO4,SU4
//! train.batch = 16,32,128
//! ```
//!
//! Relative paths are resolved against the directory holding the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::CliError;

/// Every recognised key; `true` marks keys naming an input path.
const KEYS: &[(&str, bool)] = &[
    ("data.jets", true),
    ("data.images", true),
    ("data.features", true),
    ("data.count", false),
    ("data.train_fraction", false),
    ("data.split_seed", false),
    ("data.components", false),
    ("model.kind", false),
    ("model.circuit", false),
    ("model.encoding", false),
    ("model.connectivity", false),
    ("model.arch", false),
    ("model.circuit_file", true),
    ("model.name", false),
    ("train.epochs", false),
    ("train.batch", false),
    ("train.lr", false),
    ("train.loss", false),
    ("train.runs", false),
    ("train.seed", false),
    ("train.record_time", false),
    ("dea.tolerance", false),
    ("dea.points", false),
    ("dea.seed", false),
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentConfig {
    values: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| CliError::Usage(format!("config line {}: {msg}", i + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected 'section.key = value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let Some(&(_, is_path)) = KEYS.iter().find(|(k, _)| *k == key) else {
                return Err(bad(format!("unknown key '{key}'")));
            };
            if value.is_empty() {
                return Err(bad(format!("empty value for '{key}'")));
            }
            let value = if is_path {
                let p = base.join(value);
                if !p.exists() {
                    return Err(bad(format!("path '{}' does not exist", p.display())));
                }
                p.to_string_lossy().into_owned()
            } else {
                value.to_string()
            };
            if values.insert(key.to_string(), value).is_some() {
                return Err(bad(format!("duplicate key '{key}'")));
            }
        }
        Ok(ExperimentConfig { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        debug_assert!(KEYS.iter().any(|(k, _)| *k == key), "unregistered key {key}");
        self.values.get(key).map(String::as_str)
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Usage(format!("config key {key} = '{v}': {e}")))
            })
            .transpose()
    }
}

/// Splits a comma-separated list and parses every entry.
pub fn parse_list<T: FromStr>(what: &str, text: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    let items: Vec<T> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| CliError::Usage(format!("{what} '{s}': {e}"))))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(CliError::Usage(format!("empty {what} list")));
    }
    Ok(items)
}
