//! Canonical JSON: object keys sorted, two-space indentation, trailing
//! newline. Equal values always print to identical bytes.

use serde::Serialize;
use serde_json::Value;

/// Sort keys recursively. `serde_json::Map` is already ordered unless the
/// `preserve_order` feature is enabled somewhere in the build, so this is
/// normally a no-op walk.
pub fn canonical_value<T: Serialize + ?Sized>(v: &T) -> serde_json::Result<Value> {
    Ok(sort(serde_json::to_value(v)?))
}

fn sort(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, sort(v))).collect())
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(sort).collect()),
        other => other,
    }
}

pub fn to_canonical_string<T: Serialize + ?Sized>(v: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(&canonical_value(v)?)?;
    s.push('\n');
    Ok(s)
}
