//! Point-cloud CSV ingestion: one point per line, comma-separated
//! coordinates, optional single header line.

use std::path::Path;

use crate::error::{Error, Result};
use crate::meb::PointCloud;

pub fn parse_points_csv(path: impl AsRef<Path>) -> Result<PointCloud> {
    let text =
        std::fs::read_to_string(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_points_str(&text)
}

pub fn parse_points_str(text: &str) -> Result<PointCloud> {
    let mut coords = Vec::new();
    let mut dim: Option<usize> = None;
    let mut first_content_line = true;

    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if first_content_line {
            first_content_line = false;
            if cells[0].parse::<f64>().is_err() {
                continue;
            }
        }
        match dim {
            None => dim = Some(cells.len()),
            Some(d) if d != cells.len() => {
                return Err(Error::Parse {
                    line: line_no,
                    column: None,
                    message: format!("expected {d} columns, found {}", cells.len()),
                })
            }
            Some(_) => {}
        }
        for (col, cell) in cells.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                line: line_no,
                column: Some(col + 1),
                message: format!("not a number: '{cell}'"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    column: Some(col + 1),
                    message: format!("non-finite coordinate '{cell}'"),
                });
            }
            coords.push(v);
        }
    }
    match dim {
        Some(d) => PointCloud::from_flat(d, coords),
        None => Err(Error::EmptyInput),
    }
}
