use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Round-trip representation with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        // avoid printing a signed zero left over from underflow
        format!("{:.16e}", 0.0)
    } else if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    /// Plain rendering for `#` comment lines.
    fn comment(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            other => other.csv(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => {
                Value::Number(Number::from_str(&fmt_num(*x)).expect("formatted float is valid JSON"))
            }
            Cell::Num(_) | Cell::Empty => Value::Null,
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

/// A table with metadata, rendered as commented CSV or as JSON.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub title: String,
    pub meta: Vec<(String, Cell)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
    pub error: Option<String>,
}

impl Document {
    pub fn new(title: impl Into<String>, columns: Vec<&'static str>) -> Self {
        Document {
            title: title.into(),
            columns,
            ..Document::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: Cell) {
        self.meta.push((key.to_string(), value));
    }

    pub fn summary(&mut self, key: &str, value: Cell) {
        self.summary.push((key.to_string(), value));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.title);
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {}", v.comment());
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        for (k, v) in &self.summary {
            let _ = writeln!(out, "# {k}: {}", v.comment());
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "# error: {e}");
        }
        out
    }

    fn json(&self) -> String {
        let mut meta = Map::new();
        meta.insert("title".into(), Value::from(self.title.as_str()));
        for (k, v) in &self.meta {
            meta.insert(k.clone(), v.json());
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(meta));
        doc.insert("rows".into(), Value::Array(rows));
        if !self.summary.is_empty() {
            let s: Map<String, Value> = self.summary.iter().map(|(k, v)| (k.clone(), v.json())).collect();
            doc.insert("summary".into(), Value::Object(s));
        }
        let status = if self.error.is_some() { "failed" } else { "ok" };
        doc.insert("status".into(), Value::from(status));
        doc.insert(
            "error".into(),
            self.error.as_deref().map_or(Value::Null, Value::from),
        );
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON serialization");
        s.push('\n');
        s
    }
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
