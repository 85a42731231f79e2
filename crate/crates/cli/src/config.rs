//! `key = value` config files with optional `[section]` headers.
//!
//! Keys inside a section apply to that subcommand only; keys before the first
//! header apply to all of them. `-` and `_` are interchangeable in keys.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use trendnet::pipeline::PipelineError;

#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: HashMap<String, String>,
    path: Option<PathBuf>,
}

fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

fn unquote(value: &str) -> &str {
    let v = value.trim();
    for q in ['"', '\''] {
        if v.len() >= 2 && v.starts_with(q) && v.ends_with(q) {
            return &v[1..v.len() - 1];
        }
    }
    v
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let raw = fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&raw)
            .map(|mut c| {
                c.path = Some(path.to_path_buf());
                c
            })
            .map_err(|message| PipelineError::Validation {
                path: path.to_path_buf(),
                message,
            })
    }

    pub fn parse(raw: &str) -> Result<Self, String> {
        let mut entries = HashMap::new();
        let mut section = String::new();
        for (i, line) in raw.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = normalize_key(name);
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
            let key = normalize_key(key);
            if key.is_empty() {
                return Err(format!("line {}: empty key", i + 1));
            }
            let full = if section.is_empty() {
                key
            } else {
                format!("{section}.{key}")
            };
            entries.insert(full, unquote(value).to_string());
        }
        Ok(Config { entries, path: None })
    }

    /// Section-specific value, falling back to a top-level one.
    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        let key = normalize_key(key);
        self.entries
            .get(&format!("{section}.{key}"))
            .or_else(|| self.entries.get(&key))
            .map(String::as_str)
    }

    pub fn path(&self, section: &str, key: &str) -> Option<PathBuf> {
        self.get(section, key).map(PathBuf::from)
    }

    pub fn flag(&self, section: &str, key: &str) -> Result<Option<bool>, PipelineError> {
        self.get(section, key)
            .map(|v| match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(self.invalid(key, v)),
            })
            .transpose()
    }

    pub fn invalid(&self, key: &str, value: &str) -> PipelineError {
        let message = format!("invalid value `{value}` for `{key}`");
        match &self.path {
            Some(path) => PipelineError::Validation {
                path: path.clone(),
                message,
            },
            None => PipelineError::BadParameter(message),
        }
    }
}

/// Splits `15,30` or `[15, 30]` into trimmed items.
pub fn split_list(value: &str) -> Vec<&str> {
    let v = value.trim();
    let v = v.strip_prefix('[').and_then(|v| v.strip_suffix(']')).unwrap_or(v);
    v.split(',').map(unquote).filter(|s| !s.is_empty()).collect()
}
