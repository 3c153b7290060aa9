//! Plain-text scenario configs: one `key = value` per line, `#` comments.
//!
//! Zero-dependency format chosen for trivially diffable inputs. Every
//! key must be consumed by the scenario that declares it; leftovers are
//! reported as configuration errors with their line number.

use std::collections::BTreeMap;
use std::fmt;

/// Configuration failure with the offending file and, when known, line.
#[derive(Debug, Clone)]
pub struct ConfigError {
    pub path: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}: {}", self.path, line, self.message),
            None => write!(f, "{}: {}", self.path, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Parsed key-value pairs, consumed key by key.
#[derive(Debug, Clone)]
pub struct KeyValues {
    path: String,
    pairs: BTreeMap<String, (String, usize)>,
}

impl KeyValues {
    pub fn parse(path: &str, text: &str) -> Result<Self, ConfigError> {
        let mut pairs = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError {
                    path: path.into(),
                    line: Some(line_no),
                    message: format!("expected 'key = value', got '{line}'"),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError {
                    path: path.into(),
                    line: Some(line_no),
                    message: "empty key or value".into(),
                });
            }
            if pairs.insert(key.clone(), (value, line_no)).is_some() {
                return Err(ConfigError {
                    path: path.into(),
                    line: Some(line_no),
                    message: format!("duplicate key '{key}'"),
                });
            }
        }
        Ok(Self { path: path.into(), pairs })
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn error(&self, line: Option<usize>, message: impl Into<String>) -> ConfigError {
        ConfigError { path: self.path.clone(), line, message: message.into() }
    }

    pub fn take_string(&mut self, key: &str) -> Result<String, ConfigError> {
        self.pairs
            .remove(key)
            .map(|(v, _)| v)
            .ok_or_else(|| self.error(None, format!("missing required key '{key}'")))
    }

    pub fn take_f64(&mut self, key: &str) -> Result<f64, ConfigError> {
        let (value, line) = self
            .pairs
            .remove(key)
            .ok_or_else(|| self.error(None, format!("missing required key '{key}'")))?;
        let parsed: f64 = value
            .parse()
            .map_err(|_| self.error(Some(line), format!("'{key}' is not a number: '{value}'")))?;
        if key.starts_with("tol") && !(parsed > 0.0) {
            return Err(self.error(
                Some(line),
                format!("tolerance '{key}' must be strictly positive, got {parsed}"),
            ));
        }
        Ok(parsed)
    }

    pub fn take_f64_or(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        if self.pairs.contains_key(key) {
            self.take_f64(key)
        } else {
            Ok(default)
        }
    }

    pub fn take_string_or(&mut self, key: &str, default: &str) -> Result<String, ConfigError> {
        if self.pairs.contains_key(key) {
            self.take_string(key)
        } else {
            Ok(default.to_string())
        }
    }

    pub fn take_usize(&mut self, key: &str) -> Result<usize, ConfigError> {
        let (value, line) = self
            .pairs
            .remove(key)
            .ok_or_else(|| self.error(None, format!("missing required key '{key}'")))?;
        value
            .parse()
            .map_err(|_| self.error(Some(line), format!("'{key}' is not a count: '{value}'")))
    }

    pub fn take_usize_or(&mut self, key: &str, default: usize) -> Result<usize, ConfigError> {
        if self.pairs.contains_key(key) {
            self.take_usize(key)
        } else {
            Ok(default)
        }
    }

    /// Comma-separated list of numbers.
    pub fn take_f64_list(&mut self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let (value, line) = self
            .pairs
            .remove(key)
            .ok_or_else(|| self.error(None, format!("missing required key '{key}'")))?;
        value
            .split(',')
            .map(|part| {
                part.trim().parse::<f64>().map_err(|_| {
                    self.error(Some(line), format!("'{key}' has a bad entry: '{part}'"))
                })
            })
            .collect()
    }

    /// Every key must have been consumed; anything left is unknown.
    pub fn finish(self) -> Result<(), ConfigError> {
        if let Some((key, (_, line))) = self.pairs.into_iter().next() {
            return Err(ConfigError {
                path: self.path,
                line: Some(line),
                message: format!("unknown key '{key}'"),
            });
        }
        Ok(())
    }
}
