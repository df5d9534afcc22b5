//! `key = value` run configuration. Command-line flags win over the file,
//! the file wins over built-in defaults.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default, Clone)]
pub struct Config {
    entries: HashMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-").to_ascii_lowercase()
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = HashMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", k + 1)))?;
            entries.insert(normalize(key), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Flag value, else the config entry, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.maybe(flag, key)?.unwrap_or(default))
    }

    /// Flag value, else the config entry, if either is present.
    pub fn maybe<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| v.parse().map_err(|e| CliError::Usage(format!("config key {key}: {e}"))))
            .transpose()
    }

    /// Comma-separated list from the flag or the config file.
    pub fn list<T: FromStr + Clone>(&self, flag: Option<Vec<T>>, key: &str, default: &[T]) -> Result<Vec<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse().map_err(|e| CliError::Usage(format!("config key {key}: {e}"))))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_override_defaults() {
        let c = Config::parse("n = 64\n# comment\nbeta0=0.9  # trailing\nhalf_width = 2").unwrap();
        assert_eq!(c.pick(Some(32usize), "n", 16).unwrap(), 32);
        assert_eq!(c.pick(None, "n", 16usize).unwrap(), 64);
        assert_eq!(c.pick(None, "beta0", 0.99).unwrap(), 0.9);
        assert_eq!(c.pick(None, "half-width", 1.0).unwrap(), 2.0);
        assert_eq!(c.pick(None, "alpha", 0.5).unwrap(), 0.5);
    }

    #[test]
    fn lists_and_errors() {
        let c = Config::parse("n = 32, 64 ,128\nalpha = x").unwrap();
        assert_eq!(c.list::<usize>(None, "n", &[]).unwrap(), vec![32, 64, 128]);
        assert!(c.pick(None, "alpha", 0.5f64).is_err());
        assert!(Config::parse("no equals sign").is_err());
    }
}
