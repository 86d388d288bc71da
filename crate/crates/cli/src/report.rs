//! Versioned JSON report. Numeric fields are deterministic for a fixed config; only the
//! `runtime_ms` fields vary between runs.

use crate::config::RunConfig;
use qkz_core::report::CheckReport;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: &str = "qkz-report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    /// sorted by check name
    pub checks: Vec<CheckReport>,
    /// set when the suite aborted with an error
    pub error: Option<String>,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub command: String,
    pub seed: u64,
    pub config: Value,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
    pub runtime_ms: f64,
}

impl RunReport {
    pub fn new(command: &str, cfg: &RunConfig, suites: Vec<SuiteReport>, runtime_ms: f64) -> Self {
        Self {
            schema: SCHEMA_VERSION.into(),
            command: command.into(),
            seed: cfg.seed,
            config: serde_json::to_value(cfg).unwrap_or(Value::Null),
            pass: suites.iter().all(|s| s.pass),
            suites,
            runtime_ms,
        }
    }

    pub fn path(&self, dir: &Path) -> PathBuf {
        dir.join(format!("{}.json", self.command))
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let p = self.path(dir);
        std::fs::write(&p, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(p)
    }
}

/// The report without run-specific fields (every `runtime_ms`, and `config.output`), for
/// reproducibility comparisons.
pub fn comparable(v: &Value) -> Value {
    let mut out = strip_timing(v);
    if let Some(c) = out.get_mut("config").and_then(Value::as_object_mut) {
        c.remove("output");
    }
    out
}

fn strip_timing(v: &Value) -> Value {
    match v {
        Value::Object(m) => Value::Object(m.iter().filter(|(k, _)| k.as_str() != "runtime_ms").map(|(k, x)| (k.clone(), strip_timing(x))).collect()),
        Value::Array(a) => Value::Array(a.iter().map(strip_timing).collect()),
        x => x.clone(),
    }
}

/// Structural validation against the documented schema (see docs/report-schema.json).
pub fn validate(v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("report must be an object")?;
    let need = |o: &serde_json::Map<String, Value>, k: &str, ok: fn(&Value) -> bool| -> Result<(), String> {
        match o.get(k) {
            Some(x) if ok(x) => Ok(()),
            Some(_) => Err(format!("field `{k}` has the wrong type")),
            None => Err(format!("missing field `{k}`")),
        }
    };
    if obj.get("schema").and_then(Value::as_str) != Some(SCHEMA_VERSION) {
        return Err(format!("schema must be `{SCHEMA_VERSION}`"));
    }
    need(obj, "command", Value::is_string)?;
    need(obj, "seed", Value::is_u64)?;
    need(obj, "config", Value::is_object)?;
    need(obj, "pass", Value::is_boolean)?;
    need(obj, "runtime_ms", Value::is_number)?;
    need(obj, "suites", Value::is_array)?;
    for s in obj["suites"].as_array().unwrap() {
        let s = s.as_object().ok_or("suite must be an object")?;
        need(s, "suite", Value::is_string)?;
        need(s, "pass", Value::is_boolean)?;
        need(s, "runtime_ms", Value::is_number)?;
        need(s, "checks", Value::is_array)?;
        if !s.get("error").is_some_and(|e| e.is_null() || e.is_string()) {
            return Err("suite `error` must be null or a string".into());
        }
        for c in s["checks"].as_array().unwrap() {
            let c = c.as_object().ok_or("check must be an object")?;
            need(c, "check", Value::is_string)?;
            need(c, "pass", Value::is_boolean)?;
            need(c, "samples", Value::is_u64)?;
            // non-finite residuals serialize as null
            for k in ["max_residual", "tolerance"] {
                if !c.get(k).is_some_and(|x| x.is_number() || x.is_null()) {
                    return Err(format!("check field `{k}` must be a number or null"));
                }
            }
        }
    }
    Ok(())
}
