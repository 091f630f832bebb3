//! JSON and CSV rendering. JSON objects have sorted keys, so identical runs
//! give identical bytes except for the `generated_unix` field.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Every option with its resolved value.
    pub config: BTreeMap<String, Vec<String>>,
    /// Options that kept their default value.
    pub defaults: Vec<String>,
    pub tolerances: Value,
}

impl Provenance {
    pub fn new(command: &str, config: BTreeMap<String, Vec<String>>, defaults: Vec<String>, tolerances: Value) -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            defaults,
            tolerances,
        }
    }
}

/// The result of one subcommand in both renderings.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub result: Value,
    pub csv_header: Vec<&'static str>,
    pub csv_rows: Vec<Vec<String>>,
    pub tolerances: Value,
    /// Number of failed checks, for the self-test.
    pub failures: Option<usize>,
}

/// Shortest round-trip decimal form; `.` separator regardless of locale.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Replaces non-finite floats by `null` so the JSON stays valid.
pub fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

impl Output {
    pub fn to_json(&self, provenance: &Provenance) -> Result<String> {
        let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let doc = json!({
            "command": provenance.command,
            "provenance": provenance,
            "result": self.result,
            "generated_unix": ts,
        });
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().quote_style(csv::QuoteStyle::Necessary).from_writer(Vec::new());
        w.write_record(&self.csv_header)?;
        for row in &self.csv_rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| crate::error::CliError::Output(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| crate::error::CliError::Output(e.to_string()))
    }
}

/// Drops the timestamp line from rendered JSON.
pub fn without_timestamp(json: &str) -> String {
    json.lines().filter(|l| !l.trim_start().starts_with("\"generated_unix\"")).collect::<Vec<_>>().join("\n")
}
