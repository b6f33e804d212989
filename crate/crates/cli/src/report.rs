//! Records, expectation checks and the three output layouts.

use std::fmt::Write as _;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use rz_pairing::circlevals::circular_distance;
use rz_pairing::{CircleValue, Scalar};

use crate::eval::Value;
use crate::scenario::Expected;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub output: String,
    pub expected: Expected,
    pub actual: Value,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub id: String,
    pub kind: String,
    pub origin: Option<String>,
    pub inputs: Vec<(String, String)>,
    pub outputs: Vec<(&'static str, Value)>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Unchecked,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Unchecked => "-",
        }
    }
}

impl Record {
    pub fn status(&self) -> Status {
        if self.checks.is_empty() {
            Status::Unchecked
        } else if self.checks.iter().all(|c| c.pass) {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn output(&self, name: &str) -> Option<&Value> {
        self.outputs.iter().find(|(k, _)| *k == name).map(|(_, v)| v)
    }
}

/// Exact when both sides are exact, otherwise within `tol` (circularly for
/// ℝ/ℤ values).
pub fn matches(actual: &Value, expected: &Expected, tol: f64) -> bool {
    match expected {
        Expected::AtMost(b) => actual.as_f64().is_some_and(|x| x <= *b),
        Expected::AtLeast(b) => actual.as_f64().is_some_and(|x| x >= *b),
        Expected::Text(s) => actual.to_string() == *s,
        Expected::Number(e) => match actual {
            Value::Circle(c) => {
                let Ok(e) = CircleValue::from_scalar(*e) else { return false };
                match (c.exact(), e.exact()) {
                    (Some(x), Some(y)) => x == y,
                    _ => circular_distance(*c, e) <= tol,
                }
            }
            Value::Number(s) => match (s.exact(), e.exact()) {
                (Some(x), Some(y)) => x == y,
                _ => (s.to_f64() - e.to_f64()).abs() <= tol,
            },
            Value::Int(n) => match e.exact() {
                Some(y) => y.is_integer() && *y.numer() == *n as i128,
                None => (*n as f64 - e.to_f64()).abs() <= tol,
            },
            Value::Bool(_) | Value::Text(_) => false,
        },
    }
}

impl std::fmt::Display for Expected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expected::Number(s) => write!(f, "{s}"),
            Expected::Text(s) => f.write_str(s),
            Expected::AtMost(b) => write!(f, "<= {b:e}"),
            Expected::AtLeast(b) => write!(f, ">= {b:e}"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub unchecked: usize,
}

pub fn summarize(records: &[Record]) -> Summary {
    let mut s = Summary { total: records.len(), ..Default::default() };
    for r in records {
        match r.status() {
            Status::Pass => s.passed += 1,
            Status::Fail => s.failed += 1,
            Status::Unchecked => s.unchecked += 1,
        }
    }
    s
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Number(Scalar::Float(x)) => s.serialize_f64(*x),
            Value::Circle(c) if !c.is_exact() => s.serialize_f64(c.representative()),
            Value::Int(n) => s.serialize_i64(*n),
            Value::Bool(b) => s.serialize_bool(*b),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl Serialize for Expected {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Expected::Number(Scalar::Float(x)) => s.serialize_f64(*x),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

struct Pairs<'a, K: AsRef<str>, V: Serialize>(&'a [(K, V)]);

impl<K: AsRef<str>, V: Serialize> Serialize for Pairs<'_, K, V> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            m.serialize_entry(k.as_ref(), v)?;
        }
        m.end()
    }
}

#[derive(Serialize)]
struct CheckJson<'a> {
    output: &'a str,
    expected: &'a Expected,
    actual: &'a Value,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct RecordJson<'a> {
    id: &'a str,
    kind: &'a str,
    origin: Option<&'a str>,
    status: &'static str,
    inputs: Pairs<'a, String, String>,
    outputs: Pairs<'a, &'static str, Value>,
    checks: Vec<CheckJson<'a>>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    records: Vec<RecordJson<'a>>,
    summary: Summary,
}

pub fn to_json(records: &[Record]) -> String {
    let doc = ReportJson {
        records: records
            .iter()
            .map(|r| RecordJson {
                id: &r.id,
                kind: &r.kind,
                origin: r.origin.as_deref(),
                status: r.status().label(),
                inputs: Pairs(&r.inputs),
                outputs: Pairs(&r.outputs),
                checks: r
                    .checks
                    .iter()
                    .map(|c| CheckJson {
                        output: &c.output,
                        expected: &c.expected,
                        actual: &c.actual,
                        tolerance: c.tolerance,
                        pass: c.pass,
                    })
                    .collect(),
            })
            .collect(),
        summary: summarize(records),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("plain data");
    s.push('\n');
    s
}

/// One row per output: `id,kind,origin,output,value,expected,tolerance,status`.
pub fn to_csv(records: &[Record]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "kind", "origin", "output", "value", "expected", "tolerance", "status"]).expect("in memory");
    for r in records {
        for (name, value) in &r.outputs {
            let check = r.checks.iter().find(|c| c.output == *name);
            let status = check.map_or("-", |c| if c.pass { "pass" } else { "FAIL" });
            w.write_record([
                r.id.as_str(),
                &r.kind,
                r.origin.as_deref().unwrap_or(""),
                name,
                &value.to_string(),
                &check.map(|c| c.expected.to_string()).unwrap_or_default(),
                &check.map(|c| format!("{:e}", c.tolerance)).unwrap_or_default(),
                status,
            ])
            .expect("in memory");
        }
    }
    String::from_utf8(w.into_inner().expect("in memory")).expect("utf-8 fields")
}

pub fn to_table(records: &[Record]) -> String {
    let id_w = records.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
    let kind_w = records.iter().map(|r| r.kind.len()).max().unwrap_or(4).max(4);
    let mut s = String::new();
    let _ = writeln!(s, "{:id_w$}  {:kind_w$}  {:6}  outputs", "id", "kind", "status");
    for r in records {
        let outs: Vec<String> = r.outputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(s, "{:id_w$}  {:kind_w$}  {:6}  {}", r.id, r.kind, r.status().label(), outs.join(" "));
        for c in r.checks.iter().filter(|c| !c.pass) {
            let _ = writeln!(
                s,
                "{:id_w$}    mismatch {}: expected {}, actual {}, tolerance {:e}",
                "", c.output, c.expected, c.actual, c.tolerance
            );
        }
    }
    let sum = summarize(records);
    let _ = writeln!(
        s,
        "{} scenarios: {} passed, {} failed, {} without expectations",
        sum.total, sum.passed, sum.failed, sum.unchecked
    );
    s
}
