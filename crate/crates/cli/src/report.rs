//! Report assembly and the three output formats.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

/// One command's output: `op`, parameters, results, then bookkeeping.
///
/// Exact numbers are stored as decimal strings. `csv` names the fixed
/// columns written by `--csv`, in order.
pub struct Report {
    op: &'static str,
    params: Map<String, Value>,
    results: Map<String, Value>,
    csv: &'static [&'static str],
    digest: Sha256,
    inputs: usize,
    duplicates: u64,
    started: Instant,
}

impl Report {
    pub fn new(op: &'static str, csv: &'static [&'static str]) -> Self {
        Report {
            op,
            params: Map::new(),
            results: Map::new(),
            csv,
            digest: Sha256::new(),
            inputs: 0,
            duplicates: 0,
            started: Instant::now(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params
            .insert(key.into(), Value::String(value.to_string()));
        self
    }

    pub fn result(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.results
            .insert(key.into(), Value::String(value.to_string()));
        self
    }

    pub fn result_value(&mut self, key: &str, value: Value) -> &mut Self {
        self.results.insert(key.into(), value);
        self
    }

    /// Folds an input file into the digest (length-prefixed, in argument order).
    pub fn input(&mut self, bytes: &[u8], duplicates: usize) {
        self.digest.update((bytes.len() as u64).to_le_bytes());
        self.digest.update(bytes);
        self.inputs += 1;
        self.duplicates += duplicates as u64;
    }

    fn json(self) -> Value {
        let mut out = Map::new();
        out.insert("op".into(), self.op.into());
        out.extend(self.params);
        out.extend(self.results);
        out.insert(
            "command".into(),
            Value::Array(std::env::args().skip(1).map(Value::String).collect()),
        );
        if self.inputs > 0 {
            out.insert(
                "input_digest".into(),
                hex::encode(self.digest.finalize()).into(),
            );
            out.insert(
                "duplicates_dropped".into(),
                self.duplicates.to_string().into(),
            );
        }
        out.insert(
            "timing_ms".into(),
            self.started.elapsed().as_millis().to_string().into(),
        );
        Value::Object(out)
    }

    pub fn emit(self, format: Format, out: &mut impl Write) -> Result<(), CliError> {
        let csv_columns = self.csv;
        let value = self.json();
        let Value::Object(map) = value else {
            unreachable!()
        };
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &map).map_err(CliError::io)?;
                writeln!(out).map_err(CliError::io)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut *out);
                w.write_record(csv_columns).map_err(CliError::io)?;
                w.write_record(
                    csv_columns
                        .iter()
                        .map(|c| map.get(*c).map(flat).unwrap_or_default()),
                )
                .map_err(CliError::io)?;
                w.flush().map_err(CliError::io)?;
            }
            Format::Text => {
                for (k, v) in &map {
                    if k == "command" {
                        continue;
                    }
                    writeln!(out, "{k}: {}", flat(v)).map_err(CliError::io)?;
                }
            }
        }
        Ok(())
    }
}

/// Strings verbatim, arrays joined by `;` (nested arrays by `,` inside `{}`).
fn flat(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items
            .iter()
            .map(|x| match x {
                Value::Array(inner) => {
                    format!(
                        "{{{}}}",
                        inner.iter().map(flat).collect::<Vec<_>>().join(",")
                    )
                }
                other => flat(other),
            })
            .collect::<Vec<_>>()
            .join(";"),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Value {
    Value::Array(
        items
            .into_iter()
            .map(|x| Value::String(x.to_string()))
            .collect(),
    )
}

pub fn nested<T: ToString>(rows: &[Vec<T>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| strings(r.iter().map(|x| x.to_string())))
            .collect(),
    )
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::file(path, e))?;
    tmp.write_all(contents)
        .map_err(|e| CliError::file(path, e))?;
    tmp.persist(path)
        .map_err(|e| CliError::file(path, e.error))?;
    Ok(())
}
