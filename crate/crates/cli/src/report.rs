//! Report tables and their atomic CSV / JSON rendering.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use susyqm::fmt_sig17;

use crate::{CliError, Format, Outcome};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    U(usize),
    S(String),
    B(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(v) => fmt_sig17(*v),
            Cell::U(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::U(v) => Value::from(*v),
            Cell::S(s) => Value::from(s.as_str()),
            Cell::B(b) => Value::from(*b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Layout {
    Rows,
    KeyValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    name: String,
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
    layout: Layout,
    json_only: bool,
}

impl Table {
    pub fn rows(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            layout: Layout::Rows,
            json_only: false,
        }
    }

    /// Two-column `quantity,value` table, a flat object in JSON.
    pub fn key_value(name: &str) -> Self {
        Self {
            layout: Layout::KeyValue,
            ..Self::rows(name, &["quantity", "value"])
        }
    }

    /// Always rendered as JSON, even in CSV mode.
    pub fn json_only(mut self) -> Self {
        self.json_only = true;
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }

    pub fn entry(&mut self, key: &str, value: Cell) {
        self.push(vec![Cell::S(key.to_string()), value]);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn cell(&self, row: usize, column: &str) -> Option<&Cell> {
        let c = self.header.iter().position(|h| h == column)?;
        self.rows.get(row)?.get(c)
    }

    pub fn float(&self, row: usize, column: &str) -> Option<f64> {
        match self.cell(row, column)? {
            Cell::F(v) => Some(*v),
            _ => None,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        match self.layout {
            Layout::KeyValue => Value::Object(
                self.rows
                    .iter()
                    .map(|r| (r[0].csv(), r[1].json()))
                    .collect::<Map<String, Value>>(),
            ),
            Layout::Rows => Value::Array(
                self.rows
                    .iter()
                    .map(|r| {
                        Value::Object(
                            self.header
                                .iter()
                                .cloned()
                                .zip(r.iter().map(Cell::json))
                                .collect(),
                        )
                    })
                    .collect(),
            ),
        }
    }
}

fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Writes via a temporary file in the same directory and a rename.
fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.join(name).display()));
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(contents.as_bytes()).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, &target).map_err(io)?;
    Ok(target)
}

pub(crate) fn write_all(dir: &Path, command: &str, outcome: &Outcome, format: Format) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    match format {
        Format::Csv => {
            for t in &outcome.tables {
                files.push(if t.json_only {
                    write_atomic(dir, &format!("{}.json", t.name), &json_text(&t.to_json()))?
                } else {
                    write_atomic(dir, &format!("{}.csv", t.name), &t.to_csv())?
                });
            }
        }
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("command".into(), Value::from(command));
            for t in &outcome.tables {
                doc.insert(t.name.clone(), t.to_json());
            }
            doc.insert(
                "violations".into(),
                Value::Array(outcome.violations.iter().map(|v| Value::from(v.as_str())).collect()),
            );
            files.push(write_atomic(dir, &format!("{command}.json"), &json_text(&Value::Object(doc)))?);
        }
    }
    Ok(files)
}
