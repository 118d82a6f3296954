//! `key = value` run configuration with flag > file > default precedence.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Keys accepted in a config file. Dashes and underscores are interchangeable.
pub const KNOWN_KEYS: &[&str] = &[
    "n",
    "seed",
    "noise",
    "out",
    "data",
    "hidden",
    "iterations",
    "lr",
    "momentum",
    "split",
    "split_seed",
    "model_out",
    "history_out",
    "min_hidden",
    "max_hidden",
    "range_sf_ratio",
    "range_feed_temp",
    "range_solvent_temp",
    "range_rotation",
];

#[derive(Debug, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|m| CliError::usage(format!("{}: {m}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
            let key = key.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key `{key}`", i + 1));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| CliError::usage(format!("config key `{key}`: invalid value `{v}`")))
            })
            .transpose()
    }
}

/// Resolves settings and records the effective values for echoing.
pub struct Resolver<'a> {
    file: &'a FileConfig,
    effective: Vec<(String, String)>,
}

impl<'a> Resolver<'a> {
    pub fn new(file: &'a FileConfig) -> Self {
        Resolver {
            file,
            effective: Vec::new(),
        }
    }

    pub fn value<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        let v = match flag {
            Some(v) => v,
            None => self.file.get(key)?.unwrap_or(default),
        };
        self.effective.push((key.to_string(), v.to_string()));
        Ok(v)
    }

    pub fn required<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError> {
        let v = match flag {
            Some(v) => v,
            None => self
                .file
                .get(key)?
                .ok_or_else(|| CliError::usage(format!("missing required setting `--{}`", key.replace('_', "-"))))?,
        };
        self.effective.push((key.to_string(), v.to_string()));
        Ok(v)
    }

    pub fn optional<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        let v = match flag {
            Some(v) => Some(v),
            None => self.file.get(key)?,
        };
        if let Some(v) = &v {
            self.effective.push((key.to_string(), v.to_string()));
        }
        Ok(v)
    }

    /// `lo hi` or `lo,hi` pair from the config file only.
    pub fn range(&mut self, key: &str, default: (f64, f64)) -> Result<(f64, f64), CliError> {
        let v = match self.file.values.get(key) {
            None => default,
            Some(raw) => {
                let parts: Vec<&str> = raw.split([',', ' ']).filter(|s| !s.is_empty()).collect();
                let parse = |s: &str| s.parse::<f64>().ok();
                match parts.as_slice() {
                    [a, b] => match (parse(a), parse(b)) {
                        (Some(a), Some(b)) => (a, b),
                        _ => return Err(CliError::usage(format!("config key `{key}`: invalid range `{raw}`"))),
                    },
                    _ => return Err(CliError::usage(format!("config key `{key}`: expected two values"))),
                }
            }
        };
        self.effective.push((key.to_string(), format!("{} {}", v.0, v.1)));
        Ok(v)
    }

    /// Effective configuration as `# key = value` lines.
    pub fn echo(&self) -> String {
        let mut out = String::from("# effective configuration\n");
        for (k, v) in &self.effective {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out
    }
}
