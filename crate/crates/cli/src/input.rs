use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;

use crate::CliError;

/// Reads a JSON document, reporting the file, line, column and the path of
/// the offending field when it does not match the schema.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = match e.path().to_string() {
            p if p == "." => "document".to_string(),
            p => format!("field `{p}`"),
        };
        located(path, e.inner(), &field)
    })?;
    de.end().map_err(|e| located(path, &e, "document"))?;
    Ok(value)
}

fn located(path: &Path, e: &serde_json::Error, field: &str) -> CliError {
    let msg = e.to_string();
    let msg = msg.split(" at line ").next().unwrap_or(&msg);
    CliError::Input(format!(
        "{}:{}:{}: {field}: {msg}",
        path.display(),
        e.line(),
        e.column()
    ))
}
