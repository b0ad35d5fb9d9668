//! CSV dumps of vector sequences: header `k,re_z1,im_z1,...`, one row per
//! index, 17 significant digits.

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{ComplexVector, C64};

fn file_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::File(format!("{}: {e}", path.display()))
}

pub fn header(dim: usize) -> Vec<String> {
    let mut h = vec!["k".to_string()];
    for i in 1..=dim {
        h.push(format!("re_z{i}"));
        h.push(format!("im_z{i}"));
    }
    h
}

pub fn write_sequence(path: &Path, seq: &[ComplexVector]) -> Result<()> {
    let dim = seq.first().map_or(0, |v| v.len());
    let mut w = csv::Writer::from_path(path).map_err(|e| file_error(path, e))?;
    w.write_record(header(dim)).map_err(|e| file_error(path, e))?;
    for (k, v) in seq.iter().enumerate() {
        let mut row = vec![k.to_string()];
        for z in v.iter() {
            row.push(format!("{:.16e}", z.re));
            row.push(format!("{:.16e}", z.im));
        }
        w.write_record(&row).map_err(|e| file_error(path, e))?;
    }
    w.flush().map_err(|e| file_error(path, e))
}

/// Reads a sequence of vectors of length `dim`; rows must be numbered
/// `0, 1, 2, ...`.
pub fn read_sequence(path: &Path, dim: usize) -> Result<Vec<ComplexVector>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| file_error(path, e))?;
    let cols = r.headers().map_err(|e| file_error(path, e))?.len();
    if cols != 1 + 2 * dim {
        return Err(Error::DimensionMismatch(format!(
            "{}: expected {} columns, found {cols}",
            path.display(),
            1 + 2 * dim
        )));
    }
    let mut out = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| file_error(path, e))?;
        if rec.len() != cols {
            return Err(Error::DimensionMismatch(format!(
                "{}: row {row} has {} columns",
                path.display(),
                rec.len()
            )));
        }
        let parse = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|e| file_error(path, format!("row {row}, column {i}: {e}")))
        };
        let k = rec[0]
            .parse::<usize>()
            .map_err(|e| file_error(path, format!("row {row}: bad index: {e}")))?;
        if k != row {
            return Err(file_error(path, format!("row {row} is labelled k = {k}")));
        }
        let v = (0..dim)
            .map(|i| Ok(C64::new(parse(1 + 2 * i)?, parse(2 + 2 * i)?)))
            .collect::<Result<Vec<_>>>()?;
        out.push(ComplexVector::from_vec(v));
    }
    Ok(out)
}
