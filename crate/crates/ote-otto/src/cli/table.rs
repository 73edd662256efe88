//! Tabular results with units, metadata, and lossless serialization.
//!
//! Every command emits one [`ResultTable`]: a column schema (`name` +
//! `unit`), numeric rows, and a string metadata map (config digest, code
//! version, timestamp, defaulted keys). CSV output prints metadata as
//! leading `# key = value` comment lines, one `name[unit]` header line, and
//! rows at a fixed number of significant digits — 17 by default, at which
//! point a write/parse round trip reproduces every f64 bit for bit. JSON
//! mirrors the same schema; non-finite cells are encoded as the strings
//! "inf", "-inf", "NaN" in both formats (JSON numbers cannot carry them).

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};

use super::config::OutputFormat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

#[derive(Clone, Debug)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: BTreeMap<String, String>,
}

fn check_token(kind: &str, s: &str) -> Result<()> {
    if s.is_empty() && kind == "column name" {
        return Err(Error::config("column name must not be empty"));
    }
    if s.contains(',') || s.contains('[') || s.contains(']') || s.contains('\n') {
        return Err(Error::config(format!(
            "{kind} '{s}' must not contain ',', '[', ']' or newlines"
        )));
    }
    Ok(())
}

/// One numeric cell at `digits` significant digits; non-finite values get
/// the fixed spellings `inf` / `-inf` / `NaN` (which `f64::from_str` reads
/// back exactly).
fn format_cell(v: f64, digits: usize) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{:.*e}", digits.saturating_sub(1), v)
    }
}

fn parse_cell(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::io(format!("unreadable numeric cell '{s}'")))
}

impl ResultTable {
    pub fn new(columns: &[(&str, &str)]) -> Result<Self> {
        for (name, unit) in columns {
            check_token("column name", name)?;
            check_token("column unit", unit)?;
        }
        Ok(ResultTable {
            columns: columns
                .iter()
                .map(|(name, unit)| Column {
                    name: name.to_string(),
                    unit: unit.to_string(),
                })
                .collect(),
            rows: Vec::new(),
            metadata: BTreeMap::new(),
        })
    }

    /// Append a row; its arity must match the schema.
    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::config(format!(
                "row has {} cells but the table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn set_meta(&mut self, key: &str, value: &str) {
        // keys and values are kept single-line so the CSV comment block
        // stays parseable; '=' is reserved as the key/value separator
        debug_assert!(!key.contains('=') && !key.contains('\n'));
        debug_assert!(!value.contains('\n'));
        self.metadata.insert(key.to_string(), value.to_string());
    }

    pub fn to_csv(&self, precision: usize) -> String {
        let digits = precision.clamp(3, 17);
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("{}[{}]", c.name, c.unit))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_cell(v, digits)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut metadata = BTreeMap::new();
        let mut lines = text.lines().peekable();
        while let Some(line) = lines.peek() {
            let Some(rest) = line.strip_prefix('#') else { break };
            let rest = rest.trim();
            if let Some((k, v)) = rest.split_once('=') {
                metadata.insert(k.trim().to_string(), v.trim().to_string());
            }
            lines.next();
        }
        let header = lines
            .next()
            .ok_or_else(|| Error::io("csv table has no header line"))?;
        let mut columns = Vec::new();
        for field in header.split(',') {
            let field = field.trim();
            let open = field
                .rfind('[')
                .ok_or_else(|| Error::io(format!("column '{field}' lacks a [unit] suffix")))?;
            if !field.ends_with(']') {
                return Err(Error::io(format!("column '{field}' lacks a closing ']'")));
            }
            columns.push(Column {
                name: field[..open].to_string(),
                unit: field[open + 1..field.len() - 1].to_string(),
            });
        }
        let mut rows = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(parse_cell)
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != columns.len() {
                return Err(Error::io(format!(
                    "csv row has {} cells, expected {}",
                    row.len(),
                    columns.len()
                )));
            }
            rows.push(row);
        }
        Ok(ResultTable {
            columns,
            rows,
            metadata,
        })
    }

    pub fn to_json(&self) -> String {
        let columns: Vec<Value> = self
            .columns
            .iter()
            .map(|c| json!({ "name": c.name, "unit": c.unit }))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|&v| match serde_json::Number::from_f64(v) {
                            Some(n) => Value::Number(n),
                            // non-finite: fixed string spellings
                            None => Value::String(format_cell(v, 17)),
                        })
                        .collect(),
                )
            })
            .collect();
        let doc = json!({
            "metadata": self.metadata,
            "columns": columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("table serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value =
            serde_json::from_str(text).map_err(|e| Error::io(format!("json table: {e}")))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| Error::io("json table root must be an object"))?;
        let mut metadata = BTreeMap::new();
        if let Some(meta) = obj.get("metadata").and_then(Value::as_object) {
            for (k, v) in meta {
                let s = v
                    .as_str()
                    .ok_or_else(|| Error::io(format!("metadata '{k}' is not a string")))?;
                metadata.insert(k.clone(), s.to_string());
            }
        }
        let mut columns = Vec::new();
        for c in obj
            .get("columns")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::io("json table lacks a columns array"))?
        {
            let name = c.get("name").and_then(Value::as_str);
            let unit = c.get("unit").and_then(Value::as_str);
            match (name, unit) {
                (Some(name), Some(unit)) => columns.push(Column {
                    name: name.to_string(),
                    unit: unit.to_string(),
                }),
                _ => return Err(Error::io("json column needs string name and unit")),
            }
        }
        let mut rows = Vec::new();
        for row in obj
            .get("rows")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::io("json table lacks a rows array"))?
        {
            let cells = row
                .as_array()
                .ok_or_else(|| Error::io("json row is not an array"))?;
            let mut out = Vec::with_capacity(cells.len());
            for cell in cells {
                let v = match cell {
                    Value::Number(n) => n
                        .as_f64()
                        .ok_or_else(|| Error::io(format!("non-f64 cell {n}")))?,
                    Value::String(s) => parse_cell(s)?,
                    other => return Err(Error::io(format!("unreadable cell {other}"))),
                };
                out.push(v);
            }
            if out.len() != columns.len() {
                return Err(Error::io(format!(
                    "json row has {} cells, expected {}",
                    out.len(),
                    columns.len()
                )));
            }
            rows.push(out);
        }
        Ok(ResultTable {
            columns,
            rows,
            metadata,
        })
    }

    pub fn render(&self, format: OutputFormat, precision: usize) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(precision),
            OutputFormat::Json => self.to_json(),
        }
    }

    /// Write to `path`, or to stdout when no path is given.
    pub fn write_to(
        &self,
        path: Option<&Path>,
        format: OutputFormat,
        precision: usize,
    ) -> Result<()> {
        let text = self.render(format, precision);
        match path {
            Some(p) => std::fs::write(p, text)
                .map_err(|e| Error::io(format!("writing {}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| Error::io(format!("writing stdout: {e}")))
            }
        }
    }
}
