use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use super::{format_float, OutputFormat, SweepConfig};
use crate::error::{Error, Result};

/// One table entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }

    fn from_json(v: &Value) -> Result<Self> {
        Ok(match v {
            Value::Null => Cell::Empty,
            Value::Bool(b) => Cell::Bool(*b),
            Value::String(s) => Cell::Text(s.clone()),
            Value::Number(n) => Cell::Float(
                n.as_f64()
                    .ok_or_else(|| Error::Usage(format!("number {n} does not fit in f64")))?,
            ),
            other => return Err(Error::Usage(format!("unexpected table value {other}"))),
        })
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Cell::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// All values of one column; `None` if the column does not exist.
    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Numerical(format!("CSV encoding failed: {e}"));
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).map_err(csv_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Numerical(format!("CSV encoding failed: {e}")))?;
        Ok(String::from_utf8(bytes).expect("CSV output is built from UTF-8 strings"))
    }

    /// `{"metadata": {...}, "rows": [{column: value, ...}, ...]}`, with the
    /// metadata echoing the resolved configuration and its hash.
    pub fn to_json(&self, config: &SweepConfig) -> Result<String> {
        let mut meta = Map::new();
        meta.insert("name".into(), Value::String(config.name.clone()));
        meta.insert("target".into(), Value::String(config.target.name().into()));
        let resolved: Map<String, Value> = config
            .resolved()
            .into_iter()
            .map(|(k, v)| (k, Value::String(v)))
            .collect();
        meta.insert("config".into(), Value::Object(resolved));
        meta.insert("config_sha256".into(), Value::String(config.hash()));
        meta.insert(
            "columns".into(),
            Value::Array(self.columns.iter().cloned().map(Value::String).collect()),
        );
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.clone(), v.to_json()))
                        .collect(),
                )
            })
            .collect();
        let mut root = Map::new();
        root.insert("metadata".into(), Value::Object(meta));
        root.insert("rows".into(), Value::Array(rows));
        serde_json::to_string_pretty(&Value::Object(root))
            .map_err(|e| Error::Numerical(format!("JSON encoding failed: {e}")))
    }
}

/// Parses JSON written by [`ResultTable::to_json`] back into its metadata
/// object and table.
pub fn read_json(text: &str) -> Result<(Map<String, Value>, ResultTable)> {
    let bad = |what: &str| Error::Usage(format!("not a sweep result: {what}"));
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Usage(format!("invalid JSON: {e}")))?;
    let meta = root
        .get("metadata")
        .and_then(Value::as_object)
        .ok_or_else(|| bad("missing metadata"))?
        .clone();
    let columns: Vec<String> = meta
        .get("columns")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing column list"))?
        .iter()
        .map(|c| c.as_str().map(String::from).ok_or_else(|| bad("column name is not a string")))
        .collect::<Result<_>>()?;
    let mut table = ResultTable::new(columns);
    for row in root
        .get("rows")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing rows"))?
    {
        let obj = row.as_object().ok_or_else(|| bad("row is not an object"))?;
        let cells = table
            .columns
            .iter()
            .map(|c| obj.get(c).map_or(Ok(Cell::Empty), Cell::from_json))
            .collect::<Result<Vec<_>>>()?;
        table.rows.push(cells);
    }
    Ok((meta, table))
}

/// Writes the table to `path` as CSV or JSON.
pub fn emit(table: &ResultTable, config: &SweepConfig, format: OutputFormat, path: &Path) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => table.to_csv()?,
        OutputFormat::Json => table.to_json(config)?,
    };
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(text.as_bytes()).map_err(io)?;
    f.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new(vec!["r".into(), "var_x".into(), "stable".into(), "status".into()]);
        t.rows.push(vec![Cell::Float(0.1), Cell::Float(0.1442), Cell::Bool(true), Cell::Text("ok".into())]);
        t.rows.push(vec![
            Cell::Float(1.0 / 3.0),
            Cell::Empty,
            Cell::Bool(false),
            Cell::Text("unstable, \"max\" 1e3".into()),
        ]);
        t
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = ResultTable::new(vec!["a".into(), "b_dB".into()]);
        assert_eq!(t.to_csv().unwrap(), "a,b_dB\n");
    }

    #[test]
    fn csv_quotes_text() {
        let csv = sample().to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "r,var_x,stable,status");
        assert_eq!(lines[1], "0.1,0.1442,true,ok");
        assert_eq!(lines[2], "0.3333333333333333,,false,\"unstable, \"\"max\"\" 1e3\"");
    }

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let config = super::super::figure_preset("fig2b").unwrap();
        let mut t = sample();
        t.rows.push(vec![
            Cell::Float(std::f64::consts::PI * 1e-310),
            Cell::Float(0.5 * (-2f64).exp()),
            Cell::Bool(true),
            Cell::Text("ok".into()),
        ]);
        let text = t.to_json(&config).unwrap();
        let (meta, back) = read_json(&text).unwrap();
        assert_eq!(back.columns, t.columns);
        for (a, b) in t.rows.iter().zip(&back.rows) {
            for (x, y) in a.iter().zip(b) {
                match (x, y) {
                    (Cell::Float(x), Cell::Float(y)) => assert_eq!(x.to_bits(), y.to_bits()),
                    _ => assert_eq!(x, y),
                }
            }
        }
        assert_eq!(meta["config_sha256"], Value::String(config.hash()));
        assert_eq!(meta["config"]["squeeze.r"], Value::Null);
        assert_eq!(meta["config"]["sweep.axis1"], Value::String("squeeze.r 0 2 41".into()));
    }

    #[test]
    fn io_errors_carry_the_path() {
        let config = super::super::figure_preset("fig2b").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("out.csv");
        match emit(&sample(), &config, OutputFormat::Csv, &path) {
            Err(Error::Io { path: p, .. }) => assert!(p.contains("missing")),
            other => panic!("{other:?}"),
        }
        let ok = dir.path().join("out.json");
        emit(&sample(), &config, OutputFormat::Json, &ok).unwrap();
        let (_, back) = read_json(&std::fs::read_to_string(&ok).unwrap()).unwrap();
        assert_eq!(back.rows.len(), 2);
    }
}
