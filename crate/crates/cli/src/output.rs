//! Tables and their serialization. Every file starts with the provenance
//! record, so a run can be repeated from its own output.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::CliError;

#[derive(Copy, Clone, Debug, PartialEq, Eq, clap::ValueEnum, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => num(*v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Cell {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Cell {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Cell {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Cell {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Cell {
        Cell::Text(v.to_string())
    }
}

/// Shortest round-trip form; exponent notation outside `[1e-4, 1e15)`.
fn float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// JSON number, or `null` for non-finite values.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// One logical table; every row has one cell per column.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Table {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect()))
            .collect();
        Value::Array(rows)
    }
}

/// Result of one command: derived scalars plus one or more tables, the first
/// of which is the primary output.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub summary: Map<String, Value>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn single(table: Table) -> Report {
        Report { summary: Map::new(), tables: vec![table] }
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
    }
}

/// Header record. `config` holds exactly the settings needed to repeat the
/// run; output paths are left out so the bytes do not depend on them.
pub fn header(provenance: &Value, summary: &Map<String, Value>, table: &str) -> Value {
    json!({ "provenance": provenance, "table": table, "summary": summary })
}

fn write_csv(w: &mut dyn Write, head: &Value, t: &Table) -> Result<(), CliError> {
    writeln!(w, "# {head}")?;
    let mut out = csv::WriterBuilder::new().from_writer(w);
    out.write_record(&t.columns).map_err(csv_err)?;
    for r in &t.rows {
        out.write_record(r.iter().map(Cell::csv)).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

fn write_json(w: &mut dyn Write, head: &Value, t: &Table) -> Result<(), CliError> {
    let mut doc = head.clone();
    doc["rows"] = t.to_json();
    serde_json::to_writer_pretty(&mut *w, &doc).map_err(|e| CliError::Io(e.into()))?;
    writeln!(w)?;
    Ok(())
}

/// Path of a secondary table next to the primary output: `run.csv` becomes
/// `run.histogram.csv`.
pub fn sibling(path: &Path, name: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{name}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{name}"),
    };
    path.with_file_name(name)
}

/// Write every table. With `out`, the primary table goes to `out` and the
/// rest to siblings; otherwise all go to stdout, separated by blank lines.
pub fn emit(report: &Report, provenance: &Value, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let write = |w: &mut dyn Write, t: &Table| {
        let head = header(provenance, &report.summary, &t.name);
        match format {
            Format::Csv => write_csv(w, &head, t),
            Format::Json => write_json(w, &head, t),
        }
    };
    match out {
        Some(path) => {
            for (k, t) in report.tables.iter().enumerate() {
                let p = if k == 0 { path.to_path_buf() } else { sibling(path, &t.name) };
                let mut f = std::io::BufWriter::new(std::fs::File::create(&p)?);
                write(&mut f, t)?;
                f.flush()?;
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for (k, t) in report.tables.iter().enumerate() {
                if k > 0 {
                    writeln!(lock)?;
                }
                write(&mut lock, t)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_starts_with_the_header_and_quotes_commas() {
        let mut t = Table::new("main", &["a", "b"]);
        t.push(vec![1usize.into(), "x,y".into()]);
        t.push(vec![f64::NAN.into(), 0.5.into()]);
        t.push(vec![1.5e-25.into(), (-2e20).into()]);
        let mut buf = Vec::new();
        write_csv(&mut buf, &json!({"k": 1}), &t).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# {\"k\":1}\na,b\n1,\"x,y\"\nNaN,0.5\n1.5e-25,-2e20\n");
    }

    #[test]
    fn siblings_keep_the_extension() {
        assert_eq!(sibling(Path::new("/tmp/run.csv"), "histogram"), PathBuf::from("/tmp/run.histogram.csv"));
        assert_eq!(sibling(Path::new("run"), "fixed"), PathBuf::from("run.fixed"));
    }
}
