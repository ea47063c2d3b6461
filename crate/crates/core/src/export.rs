//! CSV and JSON rendering of results.
//!
//! Numbers are written in the shortest representation that round-trips to
//! the same `f64`.

use std::io::Write;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::Result;

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// Shortest round-trip decimal form of a float.
pub fn fmt_float(x: f64) -> String {
    format!("{x:?}")
}

/// One CSV line from already formatted fields.
pub fn csv_line<W: Write + ?Sized>(out: &mut W, fields: &[String]) -> Result<()> {
    writeln!(out, "{}", fields.join(","))?;
    Ok(())
}

/// Row-major CSV dump of a matrix, no header.
pub fn write_matrix_csv<W: Write + ?Sized>(out: &mut W, m: &DMatrix<f64>) -> Result<()> {
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|&x| fmt_float(x)).collect();
        csv_line(out, &row)?;
    }
    Ok(())
}

/// `# key=value` metadata lines preceding CSV output.
pub fn write_csv_metadata<W: Write + ?Sized>(out: &mut W, meta: &serde_json::Value) -> Result<()> {
    if let Some(map) = meta.as_object() {
        for (k, v) in map {
            match v {
                serde_json::Value::String(text) => writeln!(out, "# {k}={text}")?,
                other => writeln!(out, "# {k}={other}")?,
            }
        }
    }
    Ok(())
}

pub fn write_json<W: Write + ?Sized, T: Serialize + ?Sized>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}
