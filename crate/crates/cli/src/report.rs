//! Report envelope and rendering.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::doc::SCHEMA_VERSION;
use crate::error::CliError;

/// Sign and orientation conventions, echoed in every report.
pub const CONVENTIONS: [(&str, &str); 6] = [
    ("grading", "shifted: classical degree k is stored in degree k-1; brackets q_i have degree 1"),
    ("contraction", "g f = id, K d + d K = f g - id, K f = K K = g K = 0"),
    ("dupont_homotopy", "K = -sum_k (-1)^k w_{i0..ik} h_{ik} .. h_{i0}, h_{i0} applied first"),
    ("vertex_homotopy", "K = -h^i"),
    ("edge_composition", "edge 02 = bch(edge 12, edge 01), bch(a, b) = log(exp a exp b)"),
    ("rationals", "exact, serialized as \"p/q\" strings"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Result body of a command and whether its checks passed.
pub struct Outcome {
    pub passed: bool,
    pub body: Value,
}

impl Outcome {
    pub fn pass(body: Value) -> Self {
        Self { passed: true, body }
    }

    pub fn checked(passed: bool, body: Value) -> Self {
        Self { passed, body }
    }
}

pub fn header(command: &str, seed: u64, inputs: &BTreeMap<String, String>) -> Value {
    let conventions: Map<String, Value> = CONVENTIONS.iter().map(|(k, v)| (k.to_string(), Value::from(*v))).collect();
    json!({
        "tool": "linfty",
        "version": env!("CARGO_PKG_VERSION"),
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "seed": seed,
        "inputs_sha256": inputs,
        "conventions": conventions,
    })
}

pub fn envelope(header: Value, outcome: &Result<Outcome, CliError>) -> Value {
    match outcome {
        Ok(o) => json!({
            "header": header,
            "status": if o.passed { "pass" } else { "fail" },
            "result": o.body,
        }),
        Err(e) => json!({
            "header": header,
            "status": "error",
            "error": { "code": e.code(), "message": e.to_string() },
        }),
    }
}

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            flatten(report, "", &mut out);
            out
        }
    }
}

fn flatten(v: &Value, path: &str, out: &mut String) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                flatten(x, &p, out);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (i, x) in a.iter().enumerate() {
                flatten(x, &format!("{path}[{i}]"), out);
            }
        }
        Value::String(s) => out.push_str(&format!("{path}: {s}\n")),
        other => out.push_str(&format!("{path}: {other}\n")),
    }
}
