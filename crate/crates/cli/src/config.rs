//! Config files: a JSON object, or `key = value` lines with `#` comments.
//! Dotted keys nest (`planner.step = 4`); list-valued keys take
//! comma-separated items.

use serde_json::{Map, Value};

const LIST_KEYS: [&str; 7] = [
    "difficulties",
    "planners",
    "map_files",
    "mask_files",
    "sweep_alpha_pred",
    "sweep_alpha_explore",
    "noise",
];

pub fn parse_config(text: &str) -> Result<Map<String, Value>, String> {
    if text.trim_start().starts_with('{') {
        return match serde_json::from_str::<Value>(text) {
            Ok(Value::Object(m)) => Ok(m),
            Ok(_) => Err("config JSON must be an object".into()),
            Err(e) => Err(format!("config JSON: {e}")),
        };
    }
    let mut root = Map::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, raw) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
        let key = key.trim();
        let raw = raw.trim();
        if key.is_empty() {
            return Err(format!("line {}: empty key", n + 1));
        }
        let leaf = key.rsplit('.').next().unwrap_or(key);
        let value = if LIST_KEYS.contains(&key) {
            let items = raw.split(',').map(str::trim).filter(|s| !s.is_empty());
            if leaf == "noise" {
                Value::Array(items.map(noise_item).collect::<Result<_, _>>()?)
            } else {
                Value::Array(items.map(scalar).collect())
            }
        } else {
            scalar(raw)
        };
        insert_dotted(&mut root, key, value).map_err(|e| format!("line {}: {e}", n + 1))?;
    }
    Ok(root)
}

fn scalar(raw: &str) -> Value {
    match serde_json::from_str::<Value>(raw) {
        Ok(v @ (Value::Number(_) | Value::Bool(_) | Value::String(_))) => v,
        _ => Value::String(raw.to_string()),
    }
}

/// `shift:2` or `delete:0.3`, optionally followed by `:seed`.
fn noise_item(raw: &str) -> Result<Value, String> {
    let parts: Vec<&str> = raw.split(':').collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| format!("bad noise value `{raw}`"));
    let seed = match parts.get(2) {
        Some(s) => s.parse::<u64>().map_err(|_| format!("bad noise seed `{raw}`"))?,
        None => 0,
    };
    match (parts.first().copied(), parts.get(1)) {
        (Some("shift"), Some(v)) if parts.len() <= 3 => Ok(serde_json::json!({
            "kind": "gaussian_shift", "sigma": num(v)?, "seed": seed
        })),
        (Some("delete"), Some(v)) if parts.len() <= 3 => Ok(serde_json::json!({
            "kind": "deletion", "fraction": num(v)?, "seed": seed
        })),
        _ => Err(format!("noise items look like shift:2 or delete:0.3, got `{raw}`")),
    }
}

fn insert_dotted(root: &mut Map<String, Value>, key: &str, value: Value) -> Result<(), String> {
    let mut parts = key.split('.').peekable();
    let mut cur = root;
    while let Some(part) = parts.next() {
        if parts.peek().is_none() {
            if cur.contains_key(part) {
                return Err(format!("duplicate key `{key}`"));
            }
            cur.insert(part.to_string(), value);
            return Ok(());
        }
        let next = cur
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
        cur = next
            .as_object_mut()
            .ok_or_else(|| format!("`{part}` is both a value and a section"))?;
    }
    Ok(())
}
