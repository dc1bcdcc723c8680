//! Result tables and their CSV / JSON encodings.
//!
//! CSV layout: one header row of `name[unit]` cells, data rows, then footer
//! lines starting with `#` that carry `key: value` provenance. Numbers are
//! written with Rust's shortest round-trip formatting, so equal values always
//! produce equal bytes.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    /// `1` for dimensionless quantities, `-` for labels.
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Self {
            name: name.to_string(),
            unit: unit.to_string(),
        }
    }

    pub fn header(&self) -> String {
        format!("{}[{}]", self.name, self.unit)
    }

    fn parse_header(cell: &str) -> Result<Self> {
        let cell = cell.trim();
        match (cell.find('['), cell.strip_suffix(']')) {
            (Some(open), Some(inner)) if open > 0 => Ok(Self {
                name: cell[..open].to_string(),
                unit: inner[open + 1..].to_string(),
            }),
            _ => Err(Error::config(format!("header cell `{cell}` is not of the form name[unit]"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            Cell::Num(_) => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn parse(text: &str) -> Self {
        match text.parse::<f64>() {
            Ok(x) => Cell::Num(x),
            Err(_) => Cell::Text(text.to_string()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    /// Ordered `key: value` footer entries.
    pub provenance: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            provenance: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn set_provenance(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        match self.provenance.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.provenance.push((key.to_string(), value)),
        }
    }

    pub fn provenance(&self, key: &str) -> Option<&str> {
        self.provenance.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Numeric values of one column; text cells become NaN.
    pub fn numeric_column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64().unwrap_or(f64::NAN)).collect())
    }

    pub fn text_column(&self, name: &str) -> Option<Vec<String>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].render()).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(self.columns.iter().map(Column::header))
            .expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        let mut out = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output");
        for (k, v) in &self.provenance {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .has_headers(true)
            .from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(|e| Error::config(format!("bad CSV header: {e}")))?;
        let columns = headers.iter().map(Column::parse_header).collect::<Result<Vec<_>>>()?;
        let mut table = Self::new(columns);
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::config(format!("bad CSV row: {e}")))?;
            if rec.len() != table.columns.len() {
                return Err(Error::config(format!(
                    "CSV row has {} cells, header has {}",
                    rec.len(),
                    table.columns.len()
                )));
            }
            table.rows.push(rec.iter().map(Cell::parse).collect());
        }
        for line in text.lines().filter_map(|l| l.strip_prefix('#')) {
            if let Some((k, v)) = line.trim().split_once(": ") {
                table.provenance.push((k.to_string(), v.to_string()));
            }
        }
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        let provenance: serde_json::Map<String, serde_json::Value> = self
            .provenance
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let doc = serde_json::json!({
            "columns": self.columns,
            "rows": self.rows,
            "provenance": provenance,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            columns: Vec<Column>,
            rows: Vec<Vec<Cell>>,
            provenance: serde_json::Map<String, serde_json::Value>,
        }
        let doc: Doc = serde_json::from_str(text).map_err(|e| Error::config(format!("bad JSON table: {e}")))?;
        let provenance = doc
            .provenance
            .into_iter()
            .map(|(k, v)| (k, v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string())))
            .collect();
        Ok(Self {
            columns: doc.columns,
            rows: doc.rows,
            provenance,
        })
    }

    /// Writes the table to `path`, or to stdout when `path` is `None`.
    pub fn write(&self, path: Option<&Path>, format: super::config::Format) -> Result<()> {
        let text = match format {
            super::config::Format::Csv => self.to_csv(),
            super::config::Format::Json => self.to_json(),
        };
        match path {
            Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
            None => std::io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .map_err(|e| Error::io("<stdout>", e)),
        }
    }

    /// Reads a CSV or JSON table, picking the decoder from the extension.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_csv(&text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new(vec![
            Column::new("state", "-"),
            Column::new("epsilon", "ueV"),
            Column::new("C", "1"),
        ]);
        t.push(vec!["bell_1".into(), 0.0.into(), 1.0.into()]);
        t.push(vec!["psi_x_up".into(), 37.5.into(), 0.123_456_789_012_345_68.into()]);
        t.push(vec!["bell_2".into(), (-1e-300).into(), (1.0 / 3.0).into()]);
        t.set_provenance("version", "0.1.0");
        t.set_provenance("seed", "7");
        t
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "state[-],epsilon[ueV],C[1]");
        assert_eq!(lines[1], "bell_1,0,1");
        assert_eq!(lines[4], "# version: 0.1.0");
        assert_eq!(lines[5], "# seed: 7");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let t = sample();
        let back = ResultTable::from_csv(&t.to_csv()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_csv(), t.to_csv());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let t = sample();
        let back = ResultTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn malformed_header_is_rejected() {
        assert!(ResultTable::from_csv("epsilon,C[1]\n1,2\n").is_err());
        assert!(ResultTable::from_csv("epsilon[ueV],C[1]\n1\n").is_err());
    }

    #[test]
    fn column_access() {
        let t = sample();
        assert_eq!(t.numeric_column("epsilon").unwrap()[1], 37.5);
        assert_eq!(t.text_column("state").unwrap()[2], "bell_2");
        assert!(t.numeric_column("missing").is_none());
        assert_eq!(t.provenance("seed"), Some("7"));
    }

    #[test]
    fn unwritable_path_reports_io_error() {
        let err = sample()
            .write(Some(Path::new("/nonexistent-dir/x.csv")), super::super::config::Format::Csv)
            .unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
