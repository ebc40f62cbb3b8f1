//! Plot-ready whitespace-separated data tables.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Rectangular table written as a header line of column names followed by one
/// space-separated row per line. Numeric cells are formatted with the shortest
/// representation that round-trips through an f64 parse, so files are
/// bit-exact across runs with the same inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct DataTable {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl DataTable {
    pub fn new(columns: &[&str]) -> Self {
        DataTable {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn push_num_row(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.columns.len(), "row width mismatch");
        self.rows
            .push(values.iter().map(|v| format!("{v}")).collect());
    }

    /// Row with arbitrary textual cells (e.g. a solver-name column).
    pub fn push_row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.columns.len(), "row width mismatch");
        assert!(
            cells.iter().all(|c| !c.contains(char::is_whitespace)),
            "cells must not contain whitespace"
        );
        self.rows.push(cells);
    }

    pub fn cell(&self, row: usize, col: usize) -> &str {
        &self.rows[row][col]
    }

    pub fn num_cell(&self, row: usize, col: usize) -> f64 {
        self.rows[row][col]
            .parse()
            .expect("cell does not hold a number")
    }

    /// Numeric values of one column, by name.
    pub fn column_values(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[idx].parse().ok()).collect()
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{}", self.columns.join(" "))?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Write a table to `path`; UTF-8, LF line endings, deterministic.
pub fn write_dat<P: AsRef<Path>>(table: &DataTable, path: P) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    table.write_to(&mut file).map_err(io_err)
}

/// Parse a table back (whitespace splitting); used by tests and downstream
/// tooling.
pub fn read_dat<P: AsRef<Path>>(path: P) -> Result<DataTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err("empty table".into()))?;
    let columns: Vec<&str> = header.split_whitespace().collect();
    if columns.is_empty() {
        return Err(parse_err("no column names".into()));
    }
    let mut table = DataTable::new(&columns);
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<String> = line.split_whitespace().map(|s| s.to_string()).collect();
        if cells.len() != table.columns.len() {
            return Err(parse_err(format!(
                "row {k} has {} cells, expected {}",
                cells.len(),
                table.columns.len()
            )));
        }
        table.rows.push(cells);
    }
    Ok(table)
}
