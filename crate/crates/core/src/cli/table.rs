use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use super::CliError;

/// A numeric CSV table: header row plus rows of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let mut text = String::new();
        if path.as_os_str() == "-" {
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| CliError::format(format!("reading stdin: {e}")))?;
        } else {
            File::open(path)
                .and_then(|mut f| f.read_to_string(&mut text))
                .map_err(|e| CliError::format(format!("reading {}: {e}", path.display())))?;
        }
        Self::parse(&text)
            .map_err(|e| CliError::format(format!("{}: {}", path.display(), e.message)))
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| CliError::format(format!("bad header: {e}")))?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
            return Err(CliError::format("missing header row"));
        }
        let mut rows = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| CliError::format(format!("row {}: {e}", line + 1)))?;
            let row = record
                .iter()
                .enumerate()
                .map(|(k, field)| {
                    field
                        .trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| {
                            CliError::format(format!(
                                "row {}, column '{}': '{}' is not a finite number",
                                line + 1,
                                headers.get(k).map(String::as_str).unwrap_or("?"),
                                field
                            ))
                        })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(CliError::format("no data rows"));
        }
        Ok(Self { headers, rows })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[k]).collect()
    }

    /// Row-major values of the given columns.
    pub fn gather(&self, columns: &[usize]) -> Vec<f64> {
        self.rows
            .iter()
            .flat_map(|r| columns.iter().map(move |&k| r[k]))
            .collect()
    }

    /// Indices of every column whose name is not in `exclude`.
    pub fn other_columns(&self, exclude: &[&str]) -> Vec<usize> {
        (0..self.headers.len())
            .filter(|&k| !exclude.contains(&self.headers[k].as_str()))
            .collect()
    }

    /// Resolves a comma-separated list of column names.
    pub fn named_columns(&self, names: &str) -> Result<Vec<usize>, CliError> {
        names
            .split(',')
            .map(|n| {
                self.column_index(n.trim())
                    .ok_or_else(|| CliError::format(format!("no column named '{}'", n.trim())))
            })
            .collect()
    }
}
