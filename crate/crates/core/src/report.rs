//! Verification reports and their JSON/CSV encodings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub measured: Value,
    pub expected: Value,
    pub tolerance: Option<f64>,
}

impl Check {
    /// Passes when `|measured - expected| <= tolerance`; NaN fails.
    pub fn close(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        let ok = (measured - expected).abs() <= tolerance;
        Self {
            name: name.into(),
            status: Status::from_bool(ok),
            measured: number(measured),
            expected: number(expected),
            tolerance: Some(tolerance),
        }
    }

    /// Passes when `measured <= bound`.
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            status: Status::from_bool(measured <= bound),
            measured: number(measured),
            expected: Value::from(0.0),
            tolerance: Some(bound),
        }
    }

    pub fn exact(name: impl Into<String>, measured: Value, expected: Value) -> Self {
        Self {
            name: name.into(),
            status: Status::from_bool(measured == expected),
            measured,
            expected,
            tolerance: None,
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool, measured: Value) -> Self {
        Self {
            name: name.into(),
            status: Status::from_bool(ok),
            measured,
            expected: Value::Null,
            tolerance: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// JSON has no NaN or infinity; those become strings.
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from(x.to_string())
    }
}

/// Rows written instead of the check list when CSV output is requested.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub results: Vec<Check>,
    pub overall: Status,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            inputs: BTreeMap::new(),
            results: Vec::new(),
            overall: Status::Pass,
            table: None,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn push(&mut self, check: Check) {
        if !check.passed() {
            self.overall = Status::Fail;
        }
        self.results.push(check);
    }

    pub fn passed(&self) -> bool {
        self.overall == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are JSON-safe")
    }

    /// The scan table if there is one, otherwise one row per check.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.table {
            Some(table) => {
                out.push_str(&table.header.join(","));
                out.push('\n');
                for row in &table.rows {
                    let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            None => {
                out.push_str("name,status,measured,expected,tolerance\n");
                for c in &self.results {
                    let status = if c.passed() { "pass" } else { "fail" };
                    let tol = c.tolerance.map(|t| format!("{t:e}")).unwrap_or_default();
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        csv_field(&c.name),
                        status,
                        csv_field(&value_text(&c.measured)),
                        csv_field(&value_text(&c.expected)),
                        tol
                    );
                }
            }
        }
        out
    }
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
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

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}` (expected json or csv)")),
        }
    }
}

/// Writes the report to `destination`, or to `stdout` when it is `None`.
pub fn emit(report: &RunReport, format: Format, destination: Option<&Path>, stdout: &mut dyn Write) -> io::Result<()> {
    let mut text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match destination {
        Some(path) => fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    }
}
