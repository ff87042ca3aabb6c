//! Flat `key = value` configuration files with `#` comments.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

pub const KNOWN_KEYS: [&str; 17] = [
    "protocol",
    "M",
    "N",
    "t",
    "B",
    "c",
    "L",
    "trials",
    "seed",
    "out",
    "format",
    "bob",
    "mask",
    "workers",
    "granularity",
    "splitters",
    "m_range",
];

#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected `key = value`", lineno + 1))?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(format!("config line {}: unknown key `{key}`", lineno + 1));
            }
            entries.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| format!("config entry `{key}`: cannot parse `{v}`"))
            })
            .transpose()
    }

    /// Flag value if given, otherwise the config entry.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, String> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}
