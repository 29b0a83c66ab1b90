//! Flat `key = value` configuration files.
//!
//! Keys are the long flag names (`grid-resolution`, `k-prime`, ...). Blank
//! lines and lines starting with `#` are ignored. Values given on the
//! command line win over file values.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::Failure;

pub const KNOWN_KEYS: &[&str] = &[
    "n",
    "m",
    "k-prime",
    "family",
    "p",
    "theta-a",
    "theta-b",
    "samples",
    "seed",
    "workers",
    "format",
    "output",
    "grid-resolution",
    "refinement-rounds",
    "local-tolerance",
    "restarts",
    "tolerance",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Failure::usage(format!("config line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Failure::usage(format!(
                    "config line {}: unknown key {key:?}",
                    lineno + 1
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// `flag` if set, else the parsed file value.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Failure::usage(format!("config key {key}: {e}")))
            })
            .transpose()
    }

    /// Comma-separated list: `flag` if non-empty, else the file value.
    pub fn pick_list<T>(&self, flag: Vec<T>, key: &str) -> Result<Vec<T>, Failure>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if !flag.is_empty() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(Vec::new()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<T>()
                        .map_err(|e| Failure::usage(format!("config key {key}: {e}")))
                })
                .collect(),
        }
    }
}
