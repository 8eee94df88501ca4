//! Tabular reports rendered as CSV, Markdown or JSON lines.
//!
//! CSV keeps full precision (17 significant digits) so values re-parse
//! exactly; Markdown rounds for display.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
    JsonLines,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Markdown => "md",
            Format::JsonLines => "jsonl",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            "jsonl" | "json-lines" => Ok(Format::JsonLines),
            other => Err(format!("unknown format `{}` (csv, md, jsonl)", other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
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

/// Full-precision text for a float; `inf`, `-inf` and `NaN` parse back.
pub fn exact(v: f64) -> String {
    if v.is_finite() {
        format!("{:.16e}", v)
    } else {
        format!("{}", v)
    }
}

fn rounded(v: f64) -> String {
    if !v.is_finite() {
        return format!("{}", v);
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-4..1e6).contains(&a) {
        let digits = (5 - a.log10().floor() as i32).clamp(0, 9) as usize;
        format!("{:.*}", digits, v)
    } else {
        format!("{:.5e}", v)
    }
}

impl Cell {
    fn csv_text(&self) -> String {
        match self {
            Cell::Num(v) => exact(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn display_text(&self) -> String {
        match self {
            Cell::Num(v) => rounded(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.replace('|', "\\|"),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        use serde_json::Value;
        match self {
            Cell::Num(v) if v.is_finite() => Value::from(*v),
            Cell::Num(v) => Value::from(format!("{}", v)),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem when written to a directory.
    pub name: String,
    pub title: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(
        name: impl Into<String>,
        title: impl Into<String>,
        columns: Vec<&'static str>,
    ) -> Self {
        Table {
            name: name.into(),
            title: title.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Markdown => Ok(self.to_markdown()),
            Format::JsonLines => Ok(self.to_json_lines()),
        }
    }

    fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let internal = |e: csv::Error| CliError::Internal(e.to_string());
        w.write_record(&self.columns).map_err(internal)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_text))
                .map_err(internal)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
    }

    fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "## {}\n", self.title);
        let _ = writeln!(out, "| {} |", self.columns.join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(self.columns.len()));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::display_text).collect();
            let _ = writeln!(out, "| {} |", cells.join(" | "));
        }
        out
    }

    fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let mut obj = serde_json::Map::new();
            obj.insert("table".into(), self.name.clone().into());
            for (col, cell) in self.columns.iter().zip(row) {
                obj.insert((*col).to_string(), cell.json());
            }
            out.push_str(&serde_json::Value::Object(obj).to_string());
            out.push('\n');
        }
        out
    }
}

/// Writes each table to `<dir>/<name>.<ext>`, or all of them to stdout.
pub fn emit(tables: &[Table], format: Format, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| {
                CliError::Input(format!(
                    "cannot create output directory {}: {}",
                    dir.display(),
                    e
                ))
            })?;
            for t in tables {
                let path = dir.join(format!("{}.{}", t.name, format.extension()));
                std::fs::write(&path, t.render(format)?).map_err(|e| {
                    CliError::Input(format!("cannot write {}: {}", path.display(), e))
                })?;
            }
        }
        None => {
            let mut text = String::new();
            for (i, t) in tables.iter().enumerate() {
                if i > 0 && format != Format::JsonLines {
                    text.push('\n');
                }
                if format == Format::Csv && tables.len() > 1 {
                    let _ = writeln!(text, "# {}", t.title);
                }
                text.push_str(&t.render(format)?);
            }
            print!("{}", text);
        }
    }
    Ok(())
}
