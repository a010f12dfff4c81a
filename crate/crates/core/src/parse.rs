//! Tiny `name:key=value,...` grammar shared by surface and relation strings.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

pub(crate) fn parse_tagged(s: &str) -> Result<(String, BTreeMap<String, f64>)> {
    let s = s.trim();
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n.trim(), r.trim()),
        None => (s, ""),
    };
    if name.is_empty() {
        return Err(Error::Parse(format!("missing name in '{s}'")));
    }
    let mut params = BTreeMap::new();
    for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got '{item}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("'{v}' is not a number (key '{k}')")))?;
        if params.insert(k.trim().to_string(), v).is_some() {
            return Err(Error::Parse(format!("duplicate key '{}'", k.trim())));
        }
    }
    Ok((name.to_ascii_lowercase(), params))
}

/// Reject keys that are not listed in `allowed`.
pub(crate) fn check_keys(
    params: &BTreeMap<String, f64>,
    allowed: &[&str],
    what: &str,
) -> Result<()> {
    for k in params.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::Parse(format!(
                "unknown parameter '{k}' for {what} (expected {})",
                if allowed.is_empty() {
                    "none".to_string()
                } else {
                    allowed.join(", ")
                }
            )));
        }
    }
    Ok(())
}

pub(crate) fn require(params: &BTreeMap<String, f64>, key: &str, what: &str) -> Result<f64> {
    params
        .get(key)
        .copied()
        .ok_or_else(|| Error::BadParams(format!("{what} needs parameter '{key}'")))
}
