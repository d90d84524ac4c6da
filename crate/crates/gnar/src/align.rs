//! Matching series columns to network nodes.

use gnar_core::SeriesMatrix;

use crate::error::{CliError, Result};

/// Reorders the columns of `vts` to follow `names`. Every node needs a
/// column of the same name and no other columns may be present. With
/// `by_position` the columns are taken in file order and renamed.
pub fn align_series(vts: &SeriesMatrix, names: &[String], by_position: bool) -> Result<SeriesMatrix> {
    if by_position {
        if vts.n_nodes() != names.len() {
            return Err(CliError::format(format!(
                "series has {} columns, network has {} nodes",
                vts.n_nodes(),
                names.len()
            )));
        }
        return Ok(vts.clone().with_names(names.to_vec())?);
    }
    let header = vts.names();
    for (k, h) in header.iter().enumerate() {
        if header[..k].contains(h) {
            return Err(CliError::format(format!("series column {h:?} appears twice")));
        }
    }
    let unknown: Vec<&str> = header.iter().filter(|h| !names.contains(h)).map(String::as_str).collect();
    if !unknown.is_empty() {
        return Err(CliError::format(format!("series columns {unknown:?} are not network nodes")));
    }
    let perm = names
        .iter()
        .map(|n| {
            header
                .iter()
                .position(|h| h == n)
                .ok_or_else(|| CliError::format(format!("series has no column for node {n:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = vts.rows().map(|row| perm.iter().map(|&j| row[j]).collect()).collect();
    Ok(SeriesMatrix::new(names.to_vec(), rows)?)
}
