//! CSV and JSON output. Floats in CSV are written with 17 significant
//! digits, so parsing them back yields the same `f64`.

use std::fs;
use std::io::Write;
use std::path::Path;

use optsample_core::PointSet;
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// `v` in scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn coordinate_names(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("x{i}")).collect()
}

fn csv_writer(path: &Path) -> CliResult<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| CliError::failure(format!("{}: {e}", path.display())))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::failure(format!("{}: {e}", path.display()))
}

/// Writes `header` and rows of already formatted fields.
pub fn write_csv(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// `index,x1,…,xd` with one row per point.
pub fn write_points_csv(path: &Path, points: &PointSet) -> CliResult<()> {
    let mut header = vec!["index".to_string()];
    header.extend(coordinate_names(points.dim()));
    let rows = points.iter().enumerate().map(|(i, p)| {
        let mut row = vec![i.to_string()];
        row.extend(p.iter().map(|c| fmt_f64(*c)));
        row
    });
    write_csv(path, &header, rows)
}

/// Reads points from a CSV with a header row. Columns `x1…xd` hold the
/// coordinates; an optional `weight` column is returned separately; other
/// columns such as `index` are ignored.
pub fn read_points_csv(path: &Path) -> CliResult<(PointSet, Option<Vec<f64>>)> {
    let bad = |msg: String| CliError::usage(format!("{}: {msg}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    let mut coord_cols = Vec::new();
    for d in 1.. {
        match header.iter().position(|h| h.trim() == format!("x{d}")) {
            Some(c) => coord_cols.push(c),
            None => break,
        }
    }
    if coord_cols.is_empty() {
        return Err(bad("no x1 column".into()));
    }
    let weight_col = header.iter().position(|h| h.trim() == "weight");
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |c: usize| -> CliResult<f64> {
            let s = rec.get(c).unwrap_or("").trim();
            s.parse::<f64>().map_err(|_| bad(format!("row {}: `{s}` is not a number", line + 1)))
        };
        for &c in &coord_cols {
            coords.push(field(c)?);
        }
        if let Some(c) = weight_col {
            weights.push(field(c)?);
        }
    }
    let points = PointSet::new(coord_cols.len(), coords).map_err(|e| bad(e.to_string()))?;
    if points.is_empty() {
        return Err(bad("no points".into()));
    }
    Ok((points, weight_col.map(|_| weights)))
}

pub fn points_to_rows(points: &PointSet) -> Vec<Vec<f64>> {
    points.iter().map(|p| p.to_vec()).collect()
}

pub fn rows_to_points(rows: &[Vec<f64>], dim: usize) -> CliResult<PointSet> {
    if rows.is_empty() {
        return Err(CliError::usage("empty point list"));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != dim) {
        return Err(CliError::usage(format!("point {r:?} does not have dimension {dim}")));
    }
    PointSet::new(dim, rows.concat()).map_err(|e| CliError::usage(e.to_string()))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::failure(e.to_string()))?;
    text.push('\n');
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))
}
