//! Flat `key = value` configuration files.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored and
//! nesting is expressed with dotted keys (`sim.dt = 1e-4`). Keys keep their
//! file order. Every problem in a file is collected before reporting.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigMap {
    entries: Vec<(String, String)>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(String, String)> = Vec::new();
        let mut problems = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                problems.push(format!("line {}: expected `key = value`, got '{line}'", lineno + 1));
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
                problems.push(format!("line {}: invalid key '{k}'", lineno + 1));
                continue;
            }
            if v.is_empty() {
                problems.push(format!("line {}: key '{k}' has no value", lineno + 1));
                continue;
            }
            if entries.iter().any(|(e, _)| e == k) {
                problems.push(format!("line {}: duplicate key '{k}'", lineno + 1));
                continue;
            }
            entries.push((k.to_string(), v.to_string()));
        }
        if problems.is_empty() {
            Ok(Self { entries })
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let (key, value) = (key.into(), value.into());
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries sorted by key, for order-independent comparison.
    pub fn sorted(&self) -> BTreeMap<&str, &str> {
        self.iter().collect()
    }

    /// Parses a finite real, or returns a message naming the key.
    pub fn real(&self, key: &str) -> std::result::Result<Option<f64>, String> {
        self.get(key).map(|v| parse_real(key, v)).transpose()
    }
}

pub fn parse_real(key: &str, v: &str) -> std::result::Result<f64, String> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("key '{key}': '{v}' is not a finite number"))
}

/// Comma-separated list of finite reals.
pub fn parse_real_list(key: &str, v: &str) -> std::result::Result<Vec<f64>, String> {
    v.split(',').map(|t| parse_real(key, t.trim())).collect()
}

impl fmt::Display for ConfigMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_dotted_keys() {
        let c = ConfigMap::parse("# header\nJ_m = 0.004  # inertia\n\nsim.dt=1e-4\n").unwrap();
        assert_eq!(c.get("J_m"), Some("0.004"));
        assert_eq!(c.get("sim.dt"), Some("1e-4"));
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn all_problems_reported() {
        let err = ConfigMap::parse("a = 1\nbroken line\na = 2\nb =\n").unwrap_err();
        let Error::Config(msg) = err else { panic!() };
        assert!(msg.contains("line 2"));
        assert!(msg.contains("duplicate key 'a'"));
        assert!(msg.contains("'b' has no value"));
    }

    #[test]
    fn round_trip() {
        let c = ConfigMap::parse("x = 1\ny.z = 1,2,3\n").unwrap();
        assert_eq!(ConfigMap::parse(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn real_lists() {
        assert_eq!(parse_real_list("g", "1, 2.5,3e2").unwrap(), vec![1.0, 2.5, 300.0]);
        assert!(parse_real_list("g", "1,nan").is_err());
    }
}
