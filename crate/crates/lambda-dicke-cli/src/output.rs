//! Deterministic CSV/JSON table output: fixed precision, fixed column order,
//! no timestamps. JSON mirrors the CSV fields one-to-one.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

#[derive(Debug, Clone)]
pub enum Field {
    Num(f64),
    Int(i64),
    Str(String),
    Bool(bool),
    /// Rendered as an empty CSV cell / JSON null.
    Empty,
}

impl Field {
    pub fn opt_num(v: Option<f64>) -> Field {
        match v {
            Some(x) if x.is_finite() => Field::Num(x),
            _ => Field::Empty,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct OutputSpec {
    pub format: Format,
    pub path: Option<PathBuf>,
    pub precision: usize,
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, spec: &OutputSpec) -> io::Result<()> {
        let mut sink: Box<dyn Write> = match &spec.path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(io::stdout().lock()),
        };
        match spec.format {
            Format::Csv => self.write_csv(&mut sink, spec.precision),
            Format::Json => self.write_json(&mut sink, spec.precision),
        }
    }

    fn write_csv(&self, w: &mut dyn Write, precision: usize) -> io::Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|f| csv_cell(f, precision)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        w.flush()
    }

    fn write_json(&self, w: &mut dyn Write, precision: usize) -> io::Result<()> {
        let mut records = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut obj = serde_json::Map::new();
            for (name, field) in self.header.iter().zip(row.iter()) {
                obj.insert((*name).to_string(), json_value(field, precision));
            }
            records.push(serde_json::Value::Object(obj));
        }
        serde_json::to_writer_pretty(&mut *w, &serde_json::Value::Array(records))?;
        writeln!(w)?;
        w.flush()
    }
}

fn csv_cell(field: &Field, precision: usize) -> String {
    match field {
        Field::Num(x) => format_num(*x, precision),
        Field::Int(i) => i.to_string(),
        Field::Str(s) => s.clone(),
        Field::Bool(b) => b.to_string(),
        Field::Empty => String::new(),
    }
}

fn json_value(field: &Field, precision: usize) -> serde_json::Value {
    match field {
        Field::Num(x) => {
            // Round through the same fixed-precision text as the CSV so both
            // formats carry identical values.
            let rounded: f64 = format_num(*x, precision).parse().unwrap_or(*x);
            serde_json::Number::from_f64(rounded)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null)
        }
        Field::Int(i) => serde_json::Value::from(*i),
        Field::Str(s) => serde_json::Value::from(s.as_str()),
        Field::Bool(b) => serde_json::Value::from(*b),
        Field::Empty => serde_json::Value::Null,
    }
}

/// Scientific notation with a fixed number of significant decimals;
/// locale-independent and identical across runs.
pub fn format_num(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    format!("{x:.precision$e}")
}
