//! `key = value` configuration files. Keys are the long flag names without
//! the leading dashes; `_` and `-` are interchangeable.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, Result};

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config line {}: expected `key = value`", n + 1)))?;
            let key = normalize(k.trim());
            if key.is_empty() {
                return Err(CliError::Config(format!("config line {}: empty key", n + 1)));
            }
            let value = v.trim().trim_matches('"').to_string();
            if entries.insert(key.clone(), value).is_some() {
                return Err(CliError::Config(format!("config line {}: duplicate key `{key}`", n + 1)));
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::read)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.get(&normalize(key)) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::Config(format!("config key `{key}` = {v:?}: {e}"))),
        }
    }

    /// Flag value if given, else the config entry.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    /// Rejects keys not in `known`, so typos are not silently ignored.
    pub fn check_keys(&self, known: &[&str]) -> Result<()> {
        for k in self.entries.keys() {
            if !known.iter().any(|kk| normalize(kk) == *k) {
                return Err(CliError::Config(format!("unknown config key `{k}`")));
            }
        }
        Ok(())
    }
}

fn normalize(key: &str) -> String {
    key.trim_start_matches("--").replace('_', "-").to_ascii_lowercase()
}
