//! CSV ingestion for matrices, vectors and datasets.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use procrustes_core::{Dataset, SpdMatrix, SymMatrix};

use crate::error::{CliError, CliResult};

/// Asymmetry tolerated in matrix files before exact symmetrization.
pub const SYMMETRY_TOL: f64 = 1e-8;

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Rows of comma-separated floats. Blank lines are skipped and every row
/// must have the same length.
pub fn parse_rows<R: Read>(reader: R, header: bool) -> CliResult<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| CliError::usage(format!("row {}: {e}", i + 1)))?;
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| {
                    CliError::usage(format!("row {}: '{field}' is not a number", i + 1))
                })
            })
            .collect::<CliResult<Vec<f64>>>()?;
        if row.iter().any(|v| !v.is_finite()) {
            return Err(CliError::usage(format!("row {}: non-finite entry", i + 1)));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::usage("no data rows"));
    }
    Ok(rows)
}

fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

pub fn read_matrix(path: &Path) -> CliResult<DMatrix<f64>> {
    parse_rows(open(path)?, false)
        .map(|rows| to_matrix(&rows))
        .map_err(|e| e.context(&path.display().to_string()))
}

/// Square, symmetric within [`SYMMETRY_TOL`], positive semidefinite.
pub fn read_spd(path: &Path) -> CliResult<SpdMatrix> {
    let m = read_matrix(path)?;
    let ctx = |e: procrustes_core::Error| CliError::from(e).context(&path.display().to_string());
    let sym = SymMatrix::new_checked(m, SYMMETRY_TOL).map_err(ctx)?;
    SpdMatrix::new_psd(sym).map_err(ctx)
}

/// All numbers in the file, read row by row (a single row or a single column).
pub fn read_vector(path: &Path) -> CliResult<DVector<f64>> {
    let rows =
        parse_rows(open(path)?, false).map_err(|e| e.context(&path.display().to_string()))?;
    if rows.len() > 1 && rows[0].len() > 1 {
        return Err(CliError::usage(format!(
            "{}: expected a single row or column, got {}x{}",
            path.display(),
            rows.len(),
            rows[0].len()
        )));
    }
    Ok(DVector::from_iterator(
        rows.iter().map(Vec::len).sum(),
        rows.into_iter().flatten(),
    ))
}

/// One sample per row; `header` skips a leading header line.
pub fn read_dataset(path: &Path, header: bool) -> CliResult<Dataset> {
    let ctx = path.display().to_string();
    let rows = parse_rows(open(path)?, header).map_err(|e| e.context(&ctx))?;
    Dataset::new(to_matrix(&rows)).map_err(|e| CliError::from(e).context(&ctx))
}

/// Comma-separated floats from a flag value.
pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::usage(format!("'{t}' is not a number")))
        })
        .collect()
}
