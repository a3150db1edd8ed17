//! Deterministic command reports: `key: value` lines or one JSON object.

use std::fmt::Write as _;

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Default)]
pub struct Report {
    command: String,
    inputs: Vec<(String, String)>,
    result: Vec<(String, Value)>,
    diagnostics: Vec<String>,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report { command: command.to_string(), ..Report::default() }
    }

    /// Record an input by name with the digest of its contents.
    pub fn input(&mut self, name: &str, label: &str, contents: &[u8]) {
        self.inputs.push((name.to_string(), format!("{label} {}", digest(contents))));
    }

    pub fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.result.push((key.to_string(), value.into()));
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.diagnostics.push(line.into());
    }

    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command: {}", self.command).unwrap();
        for (k, v) in &self.inputs {
            writeln!(out, "input.{k}: {v}").unwrap();
        }
        for (k, v) in &self.result {
            flatten(&mut out, k, v);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut inputs = Map::new();
        for (k, v) in &self.inputs {
            inputs.insert(k.clone(), Value::String(v.clone()));
        }
        let mut result = Map::new();
        for (k, v) in &self.result {
            result.insert(k.clone(), v.clone());
        }
        let mut top = Map::new();
        top.insert("command".into(), Value::String(self.command.clone()));
        top.insert("inputs".into(), Value::Object(inputs));
        top.insert("result".into(), Value::Object(result));
        top.insert("diagnostics".into(), Value::from(self.diagnostics.clone()));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Objects become dotted keys, arrays indexed keys, scalars plain text.
fn flatten(out: &mut String, key: &str, v: &Value) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                flatten(out, &format!("{key}.{k}"), x);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(out, &format!("{key}.{i}"), x);
            }
        }
        Value::Array(a) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            writeln!(out, "{key}: [{}]", items.join(", ")).unwrap();
        }
        _ => writeln!(out, "{key}: {}", scalar(v)).unwrap(),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        Value::Object(_) => "{}".into(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattens_nested_values() {
        let mut r = Report::new("solve");
        r.input("game", "g.game", b"abc");
        r.put("winner", "Player1");
        r.put("evidence", json!({"kind": "single", "region": ["s0", "s1"], "terms": [{"won": true}]}));
        let text = r.to_text();
        assert!(text.contains("input.game: g.game sha256:ba7816bf"));
        assert!(text.contains("evidence.kind: single\n"));
        assert!(text.contains("evidence.region: [s0, s1]\n"));
        assert!(text.contains("evidence.terms.0.won: true\n"));
    }
}
