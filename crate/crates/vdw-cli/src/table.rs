//! Comma-separated tables with a `#`-prefixed provenance header.  Floats are
//! written in Rust's shortest round-trip form, so parsing a written table
//! recovers bit-identical values.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};

#[derive(Debug, Clone)]
pub struct Row {
    pub values: Vec<f64>,
    /// Non-empty when this point failed; the numeric cells hold NaN then.
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, values: Vec<f64>, error: String) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(Row { values, error });
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .columns
            .iter()
            .position(|c| c == name)
            .with_context(|| format!("no column `{name}` (have: {})", self.columns.join(", ")))?;
        Ok(self.rows.iter().map(|r| r.values[idx]).collect())
    }

    pub fn write(&self, path: &Path, header: &[String]) -> Result<()> {
        let mut out = String::new();
        for line in header {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push_str(",error\n");
        for row in &self.rows {
            let mut first = true;
            for v in &row.values {
                if !first {
                    out.push(',');
                }
                out.push_str(&format_f64(*v));
                first = false;
            }
            out.push(',');
            // keep the CSV shape: no commas inside the error message
            out.push_str(&row.error.replace(',', ";"));
            out.push('\n');
        }
        let mut file = std::fs::File::create(path)
            .with_context(|| format!("cannot create {}", path.display()))?;
        file.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read table {}", path.display()))?;
        let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('#'));
        let header = lines.next().context("table has no header row")?;
        let mut columns: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        if columns.last().map(String::as_str) != Some("error") {
            bail!("last column must be `error`, got {:?}", columns.last());
        }
        columns.pop();
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != columns.len() + 1 {
                bail!(
                    "row {}: expected {} fields, got {}",
                    n + 1,
                    columns.len() + 1,
                    fields.len()
                );
            }
            let mut values = Vec::with_capacity(columns.len());
            for (c, f) in columns.iter().zip(&fields) {
                let v: f64 = f
                    .trim()
                    .parse()
                    .with_context(|| format!("row {}: column `{c}`: bad float `{f}`", n + 1))?;
                values.push(v);
            }
            rows.push(Row { values, error: fields[columns.len()].trim().to_string() });
        }
        Ok(Table { columns, rows })
    }
}

/// Shortest representation that parses back to the same bits.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}
