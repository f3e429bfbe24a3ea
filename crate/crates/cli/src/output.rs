//! Reports and their CSV / JSON renderings.
//!
//! Floats are written in the shortest form that round-trips to the same
//! double. Oracle values are carried as decimal strings so that no digit
//! passes through `f64`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    /// Decimal digits that must be printed verbatim.
    Exact(String),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => float(*v),
            Cell::Exact(s) | Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(float(*v)),
            Cell::Exact(s) | Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Shortest round-trip decimal form.
pub fn float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:?}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<&'static str>) -> Self {
        Self {
            name: name.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|&c| c == name)
    }

    fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let mut m = Map::new();
                    for (c, v) in self.columns.iter().zip(r) {
                        m.insert(c.to_string(), v.json());
                    }
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

/// One pass/fail comparison against a configured tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value <= limit`.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }

    /// Passes when `value > limit`.
    pub fn above(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value > limit,
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            limit: 1.0,
            passed: ok,
        }
    }

    fn line(&self) -> String {
        format!(
            "check {} value={} limit={} {}",
            self.name,
            float(self.value),
            float(self.limit),
            if self.passed { "pass" } else { "FAIL" }
        )
    }
}

/// Everything a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub config: RunConfig,
    /// Method and discretization parameters behind the numbers.
    pub provenance: Vec<String>,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    /// Findings that do not affect the exit status.
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(config: &RunConfig) -> Self {
        Self {
            config: config.clone(),
            provenance: Vec::new(),
            tables: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    fn preamble(&self) -> Vec<String> {
        let mut lines = vec![format!("nhspec {} {}", crate::VERSION, self.config.command)];
        lines.extend(
            self.config
                .echo_lines()
                .into_iter()
                .map(|l| format!("config {l}")),
        );
        lines.extend(self.provenance.iter().map(|l| format!("source {l}")));
        lines.extend(self.notes.iter().map(|l| format!("note {l}")));
        lines.extend(self.checks.iter().map(Check::line));
        lines.push(format!(
            "status {}",
            if self.passed() { "pass" } else { "FAIL" }
        ));
        lines
    }

    fn meta(&self) -> Value {
        json!({
            "tool": "nhspec",
            "version": crate::VERSION,
            "config": self.config.to_json(),
            "provenance": self.provenance,
            "notes": self.notes,
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "value": Cell::Float(c.value).json(),
                "limit": Cell::Float(c.limit).json(),
                "passed": c.passed,
            })).collect::<Vec<_>>(),
            "passed": self.passed(),
        })
    }

    /// `# `-prefixed preamble, then for each table a header and its rows.
    /// Tables after the first are introduced by a `# table <name>` line.
    pub fn to_csv(&self, tables: &[&Table]) -> Result<String, CliError> {
        let mut out = String::new();
        for l in self.preamble() {
            out.push_str("# ");
            out.push_str(&l);
            out.push('\n');
        }
        for (i, t) in tables.iter().enumerate() {
            if i > 0 {
                out.push_str(&format!("# table {}\n", t.name));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.columns)?;
            for r in &t.rows {
                w.write_record(r.iter().map(Cell::csv))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
            out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        }
        Ok(out)
    }

    pub fn to_json(&self, tables: &[&Table]) -> String {
        let mut data = Map::new();
        for t in tables {
            data.insert(t.name.clone(), t.json_rows());
        }
        let v = json!({ "meta": self.meta(), "data": Value::Object(data) });
        let mut s = serde_json::to_string_pretty(&v).expect("json values are finite or strings");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format, tables: &[&Table]) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(tables),
            Format::Json => Ok(self.to_json(tables)),
        }
    }

    /// All tables to `--out` or to `stdout`.
    pub fn emit(&self, stdout: &mut dyn Write) -> Result<(), CliError> {
        let tables: Vec<&Table> = self.tables.iter().collect();
        let text = self.render(self.config.format, &tables)?;
        match &self.config.out {
            Some(path) => write_file(path, &text),
            None => Ok(stdout.write_all(text.as_bytes())?),
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Command;

    #[test]
    fn shortest_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 2.3106601717798212, -0.0] {
            let s = float(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(float(0.1), "0.1");
    }

    #[test]
    fn csv_quotes_commas_and_has_header() {
        let cfg = RunConfig::defaults(Command::Sweep);
        let mut r = Report::new(&cfg);
        let mut t = Table::new("t", vec!["a", "b"]);
        t.push(vec![Cell::text("(0,1)"), Cell::Float(0.5)]);
        r.tables.push(t);
        let s = r.to_csv(&[&r.tables[0]]).unwrap();
        let body: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, vec!["a,b", "\"(0,1)\",0.5"]);
    }

    #[test]
    fn json_has_meta_and_data() {
        let cfg = RunConfig::defaults(Command::Table0);
        let mut r = Report::new(&cfg);
        r.checks.push(Check::at_most("x", 1.0, 0.0));
        let mut t = Table::new("rows", vec!["e"]);
        t.push(vec![Cell::Exact("1.41777548385028633".into())]);
        r.tables.push(t);
        let v: Value = serde_json::from_str(&r.to_json(&[&r.tables[0]])).unwrap();
        assert_eq!(v["meta"]["config"]["basis-size"], 50);
        assert_eq!(v["meta"]["passed"], false);
        assert_eq!(v["data"]["rows"][0]["e"], "1.41777548385028633");
    }
}
