use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use serde_json::{json, Value};
use tmlab::report::{fmt_f64, Provenance};

use crate::{Failure, Format};

pub struct Context {
    out: Option<PathBuf>,
    format: Option<Format>,
    pub natural_log: bool,
}

impl Context {
    pub fn new(out: Option<PathBuf>, format: Option<Format>, natural_log: bool) -> Self {
        Context {
            out,
            format,
            natural_log,
        }
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    pub fn writer(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
                Failure::Resource(format!("cannot create {}: {e}", p.display()))
            })?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    pub fn write_str(&self, s: &str) -> Result<(), Failure> {
        let mut w = self.writer()?;
        w.write_all(s.as_bytes())?;
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub enum Cell {
    Int(u128),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Text(t) => t.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => match u64::try_from(*v) {
                Ok(x) => Value::from(x),
                Err(_) => Value::from(v.to_string()),
            },
            Cell::Float(v) if v.is_finite() => Value::from(*v),
            Cell::Float(v) => Value::from(fmt_f64(*v)),
            Cell::Text(t) => Value::from(t.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        Cell::Int(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

/// Rows with a fixed header, written as CSV or as one JSON document.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra top-level JSON members; emitted as `#` lines in CSV.
    pub extra: Vec<(&'static str, Value)>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
            extra: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, ctx: &Context, prov: &Provenance, format: Format) -> Result<(), Failure> {
        let mut w = ctx.writer()?;
        match format {
            Format::Csv => {
                w.write_all(prov.csv_header().as_bytes())?;
                for (k, v) in &self.extra {
                    writeln!(w, "# {k}={v}")?;
                }
                writeln!(w, "{}", self.columns.join(","))?;
                for r in &self.rows {
                    let line: Vec<String> = r.iter().map(Cell::csv).collect();
                    writeln!(w, "{}", line.join(","))?;
                }
            }
            Format::Json => {
                let rows: Vec<Value> = self.rows.iter().map(|r| Value::from(r.iter().map(Cell::json).collect::<Vec<_>>())).collect();
                let mut doc = json!({
                    "provenance": prov,
                    "columns": self.columns,
                    "rows": rows,
                });
                for (k, v) in &self.extra {
                    doc[*k] = v.clone();
                }
                serde_json::to_writer_pretty(&mut w, &doc).map_err(io::Error::from)?;
                writeln!(w)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
