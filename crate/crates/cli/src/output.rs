//! Output tables, provenance headers and atomic file writes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::Format;

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Header {
    fn csv_lines(&self) -> String {
        format!(
            "# tool: {} {}\n# command: {}\n# config_sha256: {}\n# seed: {}\n",
            self.tool, self.version, self.command, self.config_sha256, self.seed
        )
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::Float(v) => format!("{v:.16e}"),
            Self::Text(v) => v.clone(),
            Self::Bool(v) => v.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Self::Int(v) => json!(v),
            Self::Float(v) => json!(v),
            Self::Text(v) => json!(v),
            Self::Bool(v) => json!(v),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Self::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn render_csv(&self, header: &Header) -> Vec<u8> {
        let mut out = header.csv_lines();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out.into_bytes()
    }

    fn render_json(&self, header: &Header) -> Vec<u8> {
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
        document(header, json!(rows))
    }
}

fn document(header: &Header, data: Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(&json!({ "header": header, "data": data }))
        .expect("json values serialize");
    bytes.push(b'\n');
    bytes
}

/// A file produced by an experiment, ready to be written.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    /// A table named `stem.csv` or `stem.json` depending on `format`.
    pub fn table(stem: &str, table: &Table, header: &Header, format: Format) -> Self {
        match format {
            Format::Csv => Self {
                name: format!("{stem}.csv"),
                bytes: table.render_csv(header),
            },
            Format::Json => Self {
                name: format!("{stem}.json"),
                bytes: table.render_json(header),
            },
        }
    }

    pub fn json<T: Serialize>(stem: &str, data: &T, header: &Header) -> Self {
        Self {
            name: format!("{stem}.json"),
            bytes: document(
                header,
                serde_json::to_value(data).expect("reports serialize"),
            ),
        }
    }

    /// `# ` header lines, a layout line, then the raw payload.
    pub fn binary(name: &str, layout: &str, payload: &[u8], header: &Header) -> Self {
        let mut bytes = header.csv_lines().into_bytes();
        bytes.extend_from_slice(format!("# layout: {layout}\n").as_bytes());
        bytes.extend_from_slice(payload);
        Self {
            name: name.to_string(),
            bytes,
        }
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(dir: &Path, artifact: &Artifact) -> std::io::Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(&artifact.bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(dir.join(&artifact.name)).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> Header {
        Header {
            tool: "causal".into(),
            version: "0.0.0".into(),
            command: "profile".into(),
            config_sha256: "ab".into(),
            seed: 7,
        }
    }

    #[test]
    fn csv_has_header_and_round_trip_floats() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![0.1.into(), "x".into()]);
        let text = String::from_utf8(t.render_csv(&header())).unwrap();
        assert!(text.starts_with(
            "# tool: causal 0.0.0\n# command: profile\n# config_sha256: ab\n# seed: 7\na,b\n"
        ));
        let value = text.lines().last().unwrap().split(',').next().unwrap();
        assert_eq!(value.parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn json_rows_are_objects() {
        let mut t = Table::new(&["n"]);
        t.push(vec![3usize.into()]);
        let v: Value = serde_json::from_slice(&t.render_json(&header())).unwrap();
        assert_eq!(v["data"][0]["n"], 3);
        assert_eq!(v["header"]["seed"], 7);
    }

    #[test]
    fn atomic_write_replaces_files() {
        let dir = tempfile::tempdir().unwrap();
        for content in [b"one", b"two"] {
            write_atomic(
                dir.path(),
                &Artifact::binary("f.bin", "bytes", content, &header()),
            )
            .unwrap();
        }
        assert!(std::fs::read(dir.path().join("f.bin"))
            .unwrap()
            .ends_with(b"# layout: bytes\ntwo"));
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
