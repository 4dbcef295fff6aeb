use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Version of every JSON document written by the CLI.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Writes through a temporary file and a rename, so a present file is
/// always complete. `sweep --resume` relies on this.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Pretty JSON with `schema_version` and `command` prepended.
pub fn write_json<T: Serialize>(path: &Path, command: &str, body: &T) -> Result<()> {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        body,
    };
    let mut text = serde_json::to_string_pretty(&envelope)?;
    text.push('\n');
    write_text(path, &text)
}

/// JSON has no infinity; blow-up data `M = ∞` is written as `"inf"`.
pub fn datum_value(m: f64) -> serde_json::Value {
    if m.is_finite() {
        serde_json::json!(m)
    } else {
        serde_json::json!("inf")
    }
}

/// CSV with a header row; values use Rust's shortest round-trip formatting.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_leads_with_the_schema_version() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_json(&path, "norms", &serde_json::json!({"pass": true})).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("{\n  \"schema_version\": 1,\n  \"command\": \"norms\""), "{text}");
        assert!(!dir.path().join("r.json.tmp").exists());
        assert_eq!(datum_value(f64::INFINITY), serde_json::json!("inf"));
        assert_eq!(csv(&["a", "b"], [vec!["1".into(), "0.5".into()]]), "a,b\n1,0.5\n");
    }
}
