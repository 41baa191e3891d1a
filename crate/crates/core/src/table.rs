// SPDX-License-Identifier: Apache-2.0

//! Plain CSV tables of floating-point columns.

use std::path::Path;

use crate::error::{Error, Result};

/// Write a header row followed by numeric rows. Values use the shortest
/// representation that round-trips.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::contract(format!(
                "row of {} values under a {}-column header",
                row.len(),
                header.len()
            )));
        }
        w.write_record(row.iter().map(|v| v.to_string()))
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format {
            path: path.to_path_buf(),
            reason: format!("{other:?}"),
        },
    }
}
