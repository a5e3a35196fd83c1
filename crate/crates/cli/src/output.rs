use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use cce2nash::tol;

/// Writes `contents` to a temp file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write to {}", dir.display()))?;
    tmp.write_all(contents)
        .with_context(|| format!("cannot write {}", path.display()))?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Slack on reported bound checks, overridable through `CCE2NASH_TOL`.
pub fn report_tolerance() -> Result<f64> {
    match std::env::var("CCE2NASH_TOL") {
        Ok(raw) => {
            let v: f64 = raw
                .trim()
                .parse()
                .with_context(|| format!("CCE2NASH_TOL: invalid number `{raw}`"))?;
            if !v.is_finite() || v < 0.0 {
                bail!("CCE2NASH_TOL must be a nonnegative finite number, got {raw}");
            }
            Ok(v)
        }
        Err(_) => Ok(tol::GAP),
    }
}

/// Renders a flat JSON object as a two-line CSV (header, values). Nested
/// objects are flattened with `.`, arrays joined with `;`.
pub fn json_to_csv(value: &serde_json::Value) -> String {
    let mut keys = Vec::new();
    let mut vals = Vec::new();
    flatten("", value, &mut keys, &mut vals);
    format!("{}\n{}\n", keys.join(","), vals.join(","))
}

fn flatten(prefix: &str, value: &serde_json::Value, keys: &mut Vec<String>, vals: &mut Vec<String>) {
    use serde_json::Value;
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, keys, vals);
            }
        }
        Value::Array(items) => {
            keys.push(prefix.to_string());
            vals.push(items.iter().map(scalar).collect::<Vec<_>>().join(";"));
        }
        other => {
            keys.push(prefix.to_string());
            vals.push(scalar(other));
        }
    }
}

fn scalar(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
