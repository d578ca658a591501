//! CSV and atomic-file helpers.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::classical::ClassicalTrajectory;
use crate::error::{Error, Result};
use crate::fluctuation::CoupledTrajectory;
use crate::model::Quadrature;
use crate::sync::SyncSample;

pub const CLASSICAL_COLUMNS: [&str; 9] = [
    "tau", "q1s", "p1s", "re_a1", "im_a1", "q2s", "p2s", "re_a2", "im_a2",
];
pub const SYNC_COLUMNS: [&str; 8] = [
    "tau",
    "S_c",
    "S_phi",
    "S_p",
    "phi1",
    "phi2",
    "dphi_unwrapped",
    "min_symplectic_eig",
];

/// Shortest decimal text that parses back to the identical `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

/// Writes `contents` to a sibling temporary file and renames it over `path`.
pub(crate) fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Domain(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub(crate) fn csv_bytes<S: AsRef<str>>(
    header: &[S],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header.iter().map(|h| h.as_ref()))?;
    for row in rows {
        w.write_record(row.iter().map(|&x| format_float(x)))?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub(crate) fn write_csv<S: AsRef<str>>(
    path: &Path,
    header: &[S],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<()> {
    fs::write(path, csv_bytes(header, rows)?)?;
    Ok(())
}

pub(crate) fn covariance_columns() -> Vec<String> {
    let mut cols = vec!["tau".to_string()];
    for i in 0..8 {
        for j in i..8 {
            cols.push(format!(
                "V_{}_{}",
                Quadrature::ALL[i].label(),
                Quadrature::ALL[j].label()
            ));
        }
    }
    cols
}

pub(crate) fn write_classical(path: &Path, traj: &ClassicalTrajectory) -> Result<()> {
    let rows = traj.times.iter().zip(&traj.states).map(|(&t, s)| {
        let mut row = vec![t];
        row.extend_from_slice(&s.to_array());
        row
    });
    write_csv(path, &CLASSICAL_COLUMNS, rows)
}

pub(crate) fn write_covariance(path: &Path, traj: &CoupledTrajectory) -> Result<()> {
    let rows = traj
        .classical
        .times
        .iter()
        .zip(&traj.covariances)
        .map(|(&t, v)| {
            let mut row = vec![t];
            row.extend(v.upper_triangle());
            row
        });
    write_csv(path, &covariance_columns(), rows)
}

pub(crate) fn write_sync(path: &Path, samples: &[SyncSample]) -> Result<()> {
    let rows = samples.iter().map(|s| {
        vec![
            s.tau,
            s.s_c,
            s.s_phi,
            s.s_p,
            s.phi1,
            s.phi2,
            s.dphi_unwrapped,
            s.min_symplectic_eig,
        ]
    });
    write_csv(path, &SYNC_COLUMNS, rows)
}

/// Reads a numeric CSV written by this crate: header names and rows.
pub fn read_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| {
                    Error::Domain(format!("{}: non-numeric field `{f}`", path.display()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}
