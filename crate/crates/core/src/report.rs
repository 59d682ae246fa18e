//! Tabular experiment reports with deterministic JSON and CSV output.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool_version: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub warnings: Vec<String>,
    /// Wall-clock data; the only field allowed to differ between identical runs.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub timings: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub kind: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub summary: BTreeMap<String, Value>,
    pub metadata: Metadata,
}

impl ExperimentReport {
    pub fn new(kind: &str, columns: &[&str]) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: kind.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
            metadata: Metadata { tool_version: TOOL_VERSION.to_string(), ..Default::default() },
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match columns");
        self.rows.push(row);
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.insert(key.to_string(), v.into());
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.metadata.warnings.push(msg.into());
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        Some(self.column(name)?.into_iter().filter_map(|v| v.as_f64()).collect())
    }

    /// Pretty JSON with a trailing newline. Timings are dropped so identical
    /// configurations serialise to identical bytes.
    pub fn to_json(&self) -> String {
        let mut r = self.clone();
        r.metadata.timings.clear();
        let mut s = serde_json::to_string_pretty(&r).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(cell_text).map(|c| csv_field(&c)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn ensure_rows(&self) -> Result<()> {
        if self.rows.is_empty() {
            Err(Error::EmptyReport)
        } else {
            Ok(())
        }
    }
}

pub fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// JSON number for finite floats, string otherwise.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(format!("{x}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_and_json_carry_same_rows() {
        let mut r = ExperimentReport::new("demo", &["a", "b"]);
        r.push(vec![json!(1), json!("x,y")]);
        r.push(vec![num(0.5), json!(null)]);
        r.metadata.timings.insert("wall".into(), 1.0);
        let csv = r.to_csv();
        assert_eq!(csv, "a,b\n1,\"x,y\"\n0.5,\n");
        let back: ExperimentReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back.rows, r.rows);
        assert!(back.metadata.timings.is_empty());
    }

    #[test]
    fn empty_report_is_an_error() {
        assert_eq!(ExperimentReport::new("x", &["a"]).ensure_rows(), Err(Error::EmptyReport));
    }
}
