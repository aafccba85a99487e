//! Canonical JSON output: sorted keys, floats at 17 significant digits,
//! newline-terminated.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
}

/// Envelope for every CLI response.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub command: Vec<String>,
    pub results: Value,
    pub findings: Vec<Value>,
    /// Present only when requested; wall-clock time breaks byte reproducibility.
    pub timing: Option<Timing>,
}

impl Report {
    pub fn new(command: Vec<String>, results: Value) -> Self {
        Report {
            tool_version: TOOL_VERSION.to_string(),
            command,
            results,
            findings: Vec::new(),
            timing: None,
        }
    }
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let x = n.as_f64().expect("finite number");
                out.push_str(&format!("{x:.16e}"));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("string serializes"));
                out.push(':');
                write_value(out, &map[key]);
            }
            out.push('}');
        }
    }
}

pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out.push('\n');
    out
}

pub fn to_canonical<S: Serialize>(x: &S) -> Result<String> {
    let v = serde_json::to_value(x).map_err(|e| Error::Parse {
        field: "report".into(),
        reason: e.to_string(),
    })?;
    Ok(canonical_json(&v))
}

pub fn serialize_report(r: &Report) -> Result<String> {
    to_canonical(r)
}
