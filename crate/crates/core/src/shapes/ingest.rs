//! CSV ingestion for `point_cloud` shapes: one point per row, header
//! `x0,...,x{n-1}`.

use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};

pub fn read_point_cloud_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = reader.headers()?.clone();
    let dim = headers.len();
    for (i, h) in headers.iter().enumerate() {
        if h != format!("x{i}") {
            return Err(Error::InconsistentParams(format!(
                "{}: column {i} is `{h}`, expected `x{i}`",
                path.display()
            )));
        }
    }
    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let p: Vec<f64> = record
            .iter()
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| {
                Error::InconsistentParams(format!("{}: row {}: {e}", path.display(), row + 1))
            })?;
        if p.len() != dim || p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InconsistentParams(format!(
                "{}: row {} is not a finite {dim}-vector",
                path.display(),
                row + 1
            )));
        }
        points.push(p);
    }
    if points.is_empty() {
        return Err(Error::EmptyCloud);
    }
    Ok(points)
}

pub fn write_point_cloud_csv(path: &Path, points: &[Vec<f64>]) -> Result<()> {
    let dim = points.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_path(path)?;
    w.write_record((0..dim).map(|i| format!("x{i}")))?;
    for p in points {
        w.write_record(p.iter().map(|x| x.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
