use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// The config schema shipped with the binary.
pub const SCHEMA: &str = include_str!("../schema/config.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    /// JSON pointer into the config; empty for the document itself.
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    fn error(path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, path: path.into(), message: message.into() }
    }
}

fn validator() -> &'static jsonschema::Validator {
    static VALIDATOR: OnceLock<jsonschema::Validator> = OnceLock::new();
    VALIDATOR.get_or_init(|| {
        let schema: Value = serde_json::from_str(SCHEMA).expect("shipped schema is valid JSON");
        jsonschema::validator_for(&schema).expect("shipped schema compiles")
    })
}

/// Checks config text against the schema and the invariants the schema cannot express.
/// An empty list means the config is valid.
pub fn validate(config_text: &str) -> Vec<Diagnostic> {
    let value: Value = match serde_json::from_str(config_text) {
        Ok(v) => v,
        Err(e) => return vec![Diagnostic::error("", format!("not valid JSON: {e}"))],
    };
    let mut out: Vec<Diagnostic> =
        validator().iter_errors(&value).map(|e| Diagnostic::error(e.instance_path().to_string(), e.to_string())).collect();
    check_invariants(&value, &mut out);
    out.sort_by(|a, b| (&a.path, &a.message).cmp(&(&b.path, &b.message)));
    out.dedup();
    out
}

fn check_invariants(config: &Value, out: &mut Vec<Diagnostic>) {
    let payload = &config["payload"];
    match config["kind"].as_str() {
        Some("torus_ym" | "torus_minimize") => check_module(payload, "/payload", out),
        Some("torus_product") => {
            check_module(&payload["factor1"], "/payload/factor1", out);
            check_module(&payload["factor2"], "/payload/factor2", out);
        }
        Some("finite_forms") => check_triple(&payload["triple"], "/payload/triple", out),
        Some("finite_product") => {
            check_triple(&payload["triple1"], "/payload/triple1", out);
            check_triple(&payload["triple2"], "/payload/triple2", out);
        }
        _ => {}
    }
}

fn check_module(module: &Value, at: &str, out: &mut Vec<Diagnostic>) {
    let Some(n) = module["n"].as_u64().map(|n| n as usize) else { return };
    if let Some(rows) = module["theta"].as_array() {
        check_theta(rows, n, &format!("{at}/theta"), out);
    }
    let q = module["q"].as_u64().unwrap_or(1) as usize;
    let conn = &module["connection"];
    if let Some(a) = conn["A"].as_array() {
        if a.len() != n {
            out.push(Diagnostic::error(format!("{at}/connection/A"), format!("expected {n} potentials, got {}", a.len())));
        }
        for (j, m) in a.iter().enumerate() {
            check_torus_matrix(m, n, q, &format!("{at}/connection/A/{j}"), out);
        }
    }
    if !conn["proj"].is_null() {
        check_torus_matrix(&conn["proj"], n, q, &format!("{at}/connection/proj"), out);
    }
}

fn check_theta(rows: &[Value], n: usize, at: &str, out: &mut Vec<Diagnostic>) {
    let entries: Vec<Vec<f64>> =
        rows.iter().map(|r| r.as_array().map(|r| r.iter().filter_map(Value::as_f64).collect()).unwrap_or_default()).collect();
    if entries.len() != n || entries.iter().any(|r| r.len() != n) {
        out.push(Diagnostic::error(at, format!("theta must be a {n} x {n} matrix")));
        return;
    }
    let diagonal: Vec<String> = (0..n).filter(|&j| entries[j][j] != 0.0).map(|j| format!("[{j}][{j}] = {}", entries[j][j])).collect();
    if !diagonal.is_empty() {
        out.push(Diagnostic::error(at, format!("diagonal must vanish: {}", diagonal.join(", "))));
    }
    let skew: Vec<String> = (0..n)
        .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
        .filter(|&(j, k)| entries[j][k] != -entries[k][j])
        .map(|(j, k)| format!("[{j}][{k}] = {} vs [{k}][{j}] = {}", entries[j][k], entries[k][j]))
        .collect();
    if !skew.is_empty() {
        out.push(Diagnostic::error(at, format!("theta must be skew-symmetric: {}", skew.join(", "))));
    }
}

fn check_torus_matrix(m: &Value, n: usize, q: usize, at: &str, out: &mut Vec<Diagnostic>) {
    let Some(elements) = m.as_array() else { return };
    if elements.len() != q * q {
        out.push(Diagnostic::error(at, format!("expected {} entries for q = {q}, got {}", q * q, elements.len())));
    }
    let bad = elements
        .iter()
        .filter_map(Value::as_array)
        .flatten()
        .filter_map(|t| t["r"].as_array())
        .any(|r| r.len() != n);
    if bad {
        out.push(Diagnostic::error(at, format!("every multi-index must have {n} components")));
    }
}

fn check_triple(src: &Value, at: &str, out: &mut Vec<Diagnostic>) {
    if let Some(spec) = src.get("inline") {
        let Some(dim) = spec["dim_h"].as_u64().map(|d| d as usize) else { return };
        let mut check = |m: &Value, path: String| {
            if let Some(v) = m.as_array() {
                if v.len() != dim * dim {
                    out.push(Diagnostic::error(path, format!("expected {} entries for dim_h = {dim}, got {}", dim * dim, v.len())));
                }
            }
        };
        if let Some(basis) = spec["algebra_basis"].as_array() {
            for (k, m) in basis.iter().enumerate() {
                check(m, format!("{at}/inline/algebra_basis/{k}"));
            }
        }
        check(&spec["D"], format!("{at}/inline/D"));
        if !spec["gamma"].is_null() {
            check(&spec["gamma"], format!("{at}/inline/gamma"));
        }
    }
    if let Some(rows) = src.get("matrix_case").and_then(|m| m["mu"].as_array()) {
        let lens: Vec<usize> = rows.iter().map(|r| r.as_array().map_or(0, Vec::len)).collect();
        if lens.windows(2).any(|w| w[0] != w[1]) {
            out.push(Diagnostic::error(format!("{at}/matrix_case/mu"), "rows must have equal length"));
        }
        let nonzero = rows.iter().filter_map(Value::as_array).flatten().any(|e| match e {
            Value::Number(x) => x.as_f64() != Some(0.0),
            Value::Array(pair) => pair.iter().any(|x| x.as_f64() != Some(0.0)),
            _ => false,
        });
        if !nonzero {
            out.push(Diagnostic::error(format!("{at}/matrix_case/mu"), "mu must not vanish"));
        }
    }
}
