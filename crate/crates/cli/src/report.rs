//! Report envelope and the JSON / CSV writers.

use std::collections::BTreeMap;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::commands::{exit_for, Cmd, Format, Global};

pub const SCHEMA: u32 = 1;

/// Arithmetic class of a reported number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Exact,
    Interval,
    Diagnostic,
}

#[derive(Debug)]
pub struct Outcome {
    pub results: Value,
    /// Field path (dotted) to arithmetic class; unlisted numbers are exact.
    pub provenance: BTreeMap<String, Class>,
    pub exit: i32,
    /// Per-step wall times, dropped under `--deterministic`.
    pub timings: Vec<(String, f64)>,
}

impl Outcome {
    pub fn new(results: Value) -> Self {
        Outcome { results, provenance: BTreeMap::new(), exit: 0, timings: Vec::new() }
    }

    pub fn class(&mut self, path: &str, c: Class) -> &mut Self {
        self.provenance.insert(path.to_string(), c);
        self
    }
}

/// Numbers become decimal strings so nothing is lost to float parsing.
pub fn stringify_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) => Value::String(n.to_string()),
        Value::Array(a) => Value::Array(a.into_iter().map(stringify_numbers).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, stringify_numbers(v))).collect()),
        other => other,
    }
}

fn inputs(cmd: &Cmd, g: &Global) -> Value {
    // Threads only affect runtime, so they are not echoed.
    let mut v = serde_json::to_value(cmd).expect("command serializes");
    if let Value::Object(o) = &mut v {
        o.insert("precision".into(), json!(g.precision));
        o.insert("memory_budget".into(), json!(g.memory_budget));
        o.insert("large_k_gate".into(), json!(g.large_k_gate));
    }
    v
}

fn status(code: i32) -> &'static str {
    match code {
        0 => "ok",
        2 => "hypothesis_not_met",
        3 => "violation",
        4 => "resource_refusal",
        _ => "usage_error",
    }
}

/// Build the full report and its exit code.
pub fn render(cmd: &Cmd, g: &Global, outcome: Result<Outcome, vmvt::Error>, elapsed: Duration) -> (String, i32) {
    let (results, provenance, code, timings, error) = match outcome {
        Ok(o) => (o.results, o.provenance, o.exit, o.timings, Value::Null),
        Err(e) => {
            let code = exit_for(&e);
            (Value::Null, BTreeMap::new(), code, Vec::new(), json!(e.to_string()))
        }
    };
    match g.format {
        Format::Json => {
            let mut top = Map::new();
            top.insert("schema".into(), json!(SCHEMA));
            top.insert("tool".into(), json!("vmvt"));
            top.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
            top.insert("command".into(), json!(cmd.verb()));
            top.insert("inputs".into(), stringify_numbers(inputs(cmd, g)));
            top.insert("status".into(), json!(status(code)));
            top.insert("exit_code".into(), json!(code));
            if !error.is_null() {
                top.insert("error".into(), error);
            }
            top.insert("results".into(), stringify_numbers(results));
            top.insert("provenance".into(), serde_json::to_value(&provenance).unwrap());
            if !g.deterministic {
                let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
                top.insert("generated_at".into(), json!(now));
                top.insert("elapsed_secs".into(), json!(format!("{:.3}", elapsed.as_secs_f64())));
                let t: Map<String, Value> = timings.into_iter().map(|(k, v)| (k, json!(format!("{v:.3}")))).collect();
                if !t.is_empty() {
                    top.insert("timings".into(), Value::Object(t));
                }
            }
            (serde_json::to_string_pretty(&Value::Object(top)).unwrap() + "\n", code)
        }
        Format::Csv => {
            let out = if error.is_null() {
                to_csv(&results)
            } else {
                to_csv(&json!({ "status": status(code), "error": error }))
            };
            (out, code)
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = a.iter().map(scalar).collect();
            out.push((prefix.to_string(), parts.join(";")));
        }
        Value::Array(_) => out.push((prefix.to_string(), v.to_string())),
        _ => out.push((prefix.to_string(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// One CSV row per element of `results.rows`, else a single row.
pub fn to_csv(results: &Value) -> String {
    let rows: Vec<&Value> = match results.get("rows").and_then(Value::as_array) {
        Some(a) => a.iter().collect(),
        None => vec![results],
    };
    let flat: Vec<Vec<(String, String)>> = rows
        .iter()
        .map(|r| {
            let mut f = Vec::new();
            flatten("", r, &mut f);
            f
        })
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = flat.first() {
        let header: Vec<&str> = first.iter().map(|(k, _)| k.as_str()).collect();
        w.write_record(&header).unwrap();
        for row in &flat {
            let by_key: BTreeMap<&str, &str> = row.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
            let rec: Vec<&str> = header.iter().map(|h| by_key.get(h).copied().unwrap_or("")).collect();
            w.write_record(&rec).unwrap();
        }
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
