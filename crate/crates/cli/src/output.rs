use std::io::{self, Write};

use serde_json::Value;

/// One compact JSON record per line, or `key: value` blocks with `pretty`.
pub fn print(records: &[Value], pretty: bool) -> io::Result<()> {
    let mut out = io::stdout().lock();
    for (k, r) in records.iter().enumerate() {
        if !pretty {
            writeln!(out, "{r}")?;
            continue;
        }
        if k > 0 {
            writeln!(out)?;
        }
        match r {
            Value::Object(fields) => {
                for (key, v) in fields {
                    writeln!(out, "{key}: {}", human(v))?;
                }
            }
            other => writeln!(out, "{}", human(other))?,
        }
    }
    out.flush()
}

fn human(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
            xs.iter().map(human).collect::<Vec<_>>().join(", ")
        }
        other => other.to_string(),
    }
}
