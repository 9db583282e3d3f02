//! Tabular results rendered as an aligned table, CSV or JSON.

use hardy_core::verify::{format_shortest, json_number};
use serde_json::Value;

use crate::config::OutputFormat;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(Option<f64>),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    pub fn num(x: f64) -> Self {
        Cell::Num(Some(x))
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn table(&self) -> String {
        match self {
            Cell::Num(Some(x)) => short(*x),
            Cell::Num(None) => "-".into(),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => if *b { "PASS" } else { "FAIL" }.into(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(Some(x)) => format_shortest(*x),
            Cell::Num(None) => String::new(),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json_number(*x),
            Cell::Int(i) => (*i).into(),
            Cell::Text(s) => s.clone().into(),
            Cell::Bool(b) => (*b).into(),
        }
    }
}

/// `x` rounded to 12 significant digits, printed in its shortest form.
pub fn short(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded != 0.0 && !(1e-4..1e15).contains(&rounded.abs()) {
        format!("{rounded:e}")
    } else {
        rounded.to_string()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra lines shown after the table only.
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Table => self.table(),
            OutputFormat::Csv => self.csv(),
            OutputFormat::Json => self.json(),
        }
    }

    /// A single row is shown as `name value` lines, several rows as aligned columns.
    fn table(&self) -> String {
        let mut out = String::new();
        if self.rows.len() == 1 {
            let w = self.columns.iter().map(|c| c.len()).max().unwrap_or(0);
            for (c, v) in self.columns.iter().zip(&self.rows[0]) {
                out.push_str(&format!("{c:<w$}  {}\n", v.table()));
            }
        } else {
            let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::table).collect()).collect();
            let widths: Vec<usize> = (0..self.columns.len())
                .map(|j| cells.iter().map(|r| r[j].len()).chain([self.columns[j].len()]).max().unwrap_or(0))
                .collect();
            let line = |items: Vec<&str>| {
                let mut s = items.iter().zip(&widths).map(|(x, w)| format!("{x:>w$}")).collect::<Vec<_>>().join("  ");
                s.push('\n');
                s
            };
            out.push_str(&line(self.columns.clone()));
            for r in &cells {
                out.push_str(&line(r.iter().map(String::as_str).collect()));
            }
        }
        for n in &self.notes {
            out.push_str(n);
            out.push('\n');
        }
        out
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::csv)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }

    /// One row renders as an object, several as an array of objects.
    fn json(&self) -> String {
        let object = |r: &Vec<Cell>| {
            Value::Object(self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect())
        };
        let value = if self.rows.len() == 1 {
            object(&self.rows[0])
        } else {
            Value::Array(self.rows.iter().map(object).collect())
        };
        let mut s = serde_json::to_string_pretty(&value).expect("json values serialize");
        s.push('\n');
        s
    }
}
