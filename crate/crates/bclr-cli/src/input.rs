//! Input loading: binary image stacks and numeric CSV tables.

use anyhow::{bail, Context, Result};
use bclr_core::{stack, ImageFrame};
use nalgebra::{DMatrix, DVector};
use std::fs::File;
use std::io::Read;
use std::path::Path;

/// A loaded dataset, either an image series or a tabular series.
pub enum Input {
    Stack(Vec<ImageFrame>),
    Table(DMatrix<f64>),
}

/// Load a dataset, sniffing the stack magic before falling back to CSV.
pub fn load(path: &Path) -> Result<Input> {
    let mut head = [0u8; 8];
    let mut file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let got = file.read(&mut head)?;
    if got == 8 && &head == stack::MAGIC {
        let frames = stack::read_stack_file(path)
            .with_context(|| format!("reading image stack {}", path.display()))?;
        Ok(Input::Stack(frames))
    } else {
        Ok(Input::Table(load_csv_matrix(path)?))
    }
}

/// Read a numeric CSV with an optional header row.
pub fn load_csv_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("reading row {idx}"))?;
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            // Only the first row may fail to parse; it is taken as a header.
            Err(e) if idx == 0 => {
                let _ = e;
                continue;
            }
            Err(e) => bail!("row {idx} is not numeric: {e}"),
        }
    }
    if rows.is_empty() {
        bail!("{} holds no data rows", path.display());
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        bail!("rows differ in column count");
    }
    let flat: Vec<f64> = rows.concat();
    Ok(DMatrix::from_row_slice(flat.len() / cols, cols, &flat))
}

/// Read a length-`d` vector from a one-row or one-column CSV.
pub fn load_csv_vector(path: &Path, d: usize) -> Result<DVector<f64>> {
    let m = load_csv_matrix(path)?;
    let flat: Vec<f64> = if m.ncols() == 1 {
        m.column(0).iter().cloned().collect()
    } else if m.nrows() == 1 {
        m.row(0).iter().cloned().collect()
    } else {
        bail!("{} must hold a single row or column", path.display());
    };
    if flat.len() != d {
        bail!("expected {d} entries, found {}", flat.len());
    }
    Ok(DVector::from_vec(flat))
}
