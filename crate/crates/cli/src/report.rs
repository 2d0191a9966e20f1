//! Experiment reports and their renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Format;
use crate::CliError;

pub const BELL_BOUND: f64 = 2.0;
pub const CIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: Option<f64>,
    pub n: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|value - target| <= tolerance`
    Near,
    /// `value <= target + tolerance`
    AtMost,
    /// `value >= target - tolerance`
    AtLeast,
    /// `value > target`
    Above,
    /// `value < target`
    Below,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
}

impl Check {
    pub fn new(value: f64, comparison: Comparison, target: f64, tolerance: f64) -> Self {
        let pass = match comparison {
            Comparison::Near => (value - target).abs() <= tolerance,
            Comparison::AtMost => value <= target + tolerance,
            Comparison::AtLeast => value >= target - tolerance,
            Comparison::Above => value > target,
            Comparison::Below => value < target,
        };
        Self {
            pass,
            value,
            target,
            tolerance,
            comparison,
        }
    }

    /// A boolean condition recorded as `1 >= 1`.
    pub fn flag(ok: bool) -> Self {
        Self {
            pass: ok,
            value: if ok { 1.0 } else { 0.0 },
            target: 1.0,
            tolerance: 0.0,
            comparison: Comparison::AtLeast,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub bell: f64,
    pub augmented: Option<f64>,
    pub cirelson: f64,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            bell: BELL_BOUND,
            augmented: None,
            cirelson: CIRELSON,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub estimates: BTreeMap<String, Estimate>,
    pub bounds: Bounds,
    pub checks: BTreeMap<String, Check>,
    /// Published reference values the estimates are compared with.
    pub targets: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(experiment: &str, seed: u64) -> Self {
        Self {
            experiment: experiment.to_string(),
            params: BTreeMap::new(),
            seed,
            estimates: BTreeMap::new(),
            bounds: Bounds::default(),
            checks: BTreeMap::new(),
            targets: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, name: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.params.insert(name.to_string(), v);
        self
    }

    pub fn exact(&mut self, name: &str, value: f64) -> &mut Self {
        self.estimates.insert(
            name.to_string(),
            Estimate {
                value,
                stderr: None,
                n: None,
            },
        );
        self
    }

    pub fn sampled(&mut self, name: &str, value: f64, stderr: f64, n: usize) -> &mut Self {
        self.estimates.insert(
            name.to_string(),
            Estimate {
                value,
                stderr: stderr.is_finite().then_some(stderr),
                n: Some(n as u64),
            },
        );
        self
    }

    pub fn check(&mut self, name: &str, check: Check) -> &mut Self {
        self.checks.insert(name.to_string(), check);
        self
    }

    pub fn target(&mut self, name: &str, value: f64) -> &mut Self {
        self.targets.insert(name.to_string(), value);
        self
    }

    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    /// Copy with every float rounded to 15 significant digits, as emitted.
    pub fn rounded(&self) -> Result<Self, CliError> {
        let v = round_value(serde_json::to_value(self).map_err(internal)?);
        serde_json::from_value(v).map_err(internal)
    }
}

fn internal(e: serde_json::Error) -> CliError {
    CliError::Internal(e.to_string())
}

/// Rounds to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round15(x)))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

pub fn emit_json(r: &Report) -> Result<String, CliError> {
    let v = round_value(serde_json::to_value(r).map_err(internal)?);
    let mut s = serde_json::to_string_pretty(&v).map_err(internal)?;
    s.push('\n');
    Ok(s)
}

fn num(x: f64) -> String {
    format!("{}", round15(x))
}

pub fn emit_csv(r: &Report) -> String {
    let mut out = String::from("name,value,stderr,n,target,pass\n");
    for (name, e) in &r.estimates {
        let target = r.targets.get(name).map(|t| num(*t)).unwrap_or_default();
        let _ = writeln!(
            out,
            "{name},{},{},{},{target},",
            num(e.value),
            e.stderr.map(num).unwrap_or_default(),
            e.n.map(|n| n.to_string()).unwrap_or_default(),
        );
    }
    for (name, c) in &r.checks {
        let _ = writeln!(out, "{name},{},,,{},{}", num(c.value), num(c.target), c.pass);
    }
    out
}

fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| format!("{cell:<w$}", w = widths[c]))
            .collect();
        let _ = writeln!(out, "  {}", line.join("  ").trim_end());
    }
    out
}

fn short(x: f64) -> String {
    if x.is_finite() && x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e6) {
        format!("{x:.6e}")
    } else {
        format!("{x:.9}")
    }
}

pub fn emit_text(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "experiment: {}", r.experiment);
    let _ = writeln!(out, "seed: {}", r.seed);
    for (k, v) in &r.params {
        let _ = writeln!(out, "param {k} = {v}");
    }
    let _ = writeln!(
        out,
        "bounds: bell {}  cirelson {}{}",
        short(r.bounds.bell),
        short(r.bounds.cirelson),
        r.bounds
            .augmented
            .map(|a| format!("  augmented {}", short(a)))
            .unwrap_or_default()
    );
    out.push_str("\nestimates:\n");
    let mut rows = vec![["name", "value", "stderr", "n", "target"].map(String::from).to_vec()];
    for (name, e) in &r.estimates {
        rows.push(vec![
            name.clone(),
            short(e.value),
            e.stderr.map(short).unwrap_or_else(|| "-".into()),
            e.n.map(|n| n.to_string()).unwrap_or_else(|| "-".into()),
            r.targets.get(name).map(|t| short(*t)).unwrap_or_else(|| "-".into()),
        ]);
    }
    out.push_str(&table(&rows));
    out.push_str("\nchecks:\n");
    let mut rows = vec![["name", "result", "value", "comparison", "target", "tolerance"]
        .map(String::from)
        .to_vec()];
    for (name, c) in &r.checks {
        rows.push(vec![
            name.clone(),
            if c.pass { "PASS" } else { "FAIL" }.to_string(),
            short(c.value),
            serde_json::to_value(c.comparison)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
            short(c.target),
            short(c.tolerance),
        ]);
    }
    out.push_str(&table(&rows));
    out
}

pub fn emit_report(r: &Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => emit_json(r),
        Format::Csv => Ok(emit_csv(r)),
        Format::Text => Ok(emit_text(r)),
    }
}
