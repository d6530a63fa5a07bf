//! ESRI ASCII grid ingestion and emission for topography and depth grids.
//!
//! The file carries six "key value" header lines in the order ncols, nrows,
//! xllcorner, yllcorner, cellsize, NODATA_value (keys case-insensitive),
//! then nrows data rows, the first row being the northernmost. On ingestion
//! rows are reordered so that index j increases northward, matching the
//! cell (i, j) convention of the solver.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Field, StructuredGrid, Topography};

#[derive(Debug, Clone, PartialEq)]
pub struct DemGrid {
    pub ncols: usize,
    pub nrows: usize,
    pub xllcorner: f64,
    pub yllcorner: f64,
    pub cellsize: f64,
    pub nodata_value: f64,
    /// Row-major, j increasing northward: values[j * ncols + i].
    values: Vec<f64>,
}

impl DemGrid {
    pub fn new(
        ncols: usize,
        nrows: usize,
        xllcorner: f64,
        yllcorner: f64,
        cellsize: f64,
        nodata_value: f64,
        values: Vec<f64>,
    ) -> Self {
        assert_eq!(values.len(), ncols * nrows);
        DemGrid { ncols, nrows, xllcorner, yllcorner, cellsize, nodata_value, values }
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.ncols + i]
    }

    pub fn to_grid(&self) -> StructuredGrid {
        StructuredGrid::new(
            self.ncols,
            self.nrows,
            self.cellsize,
            self.cellsize,
            self.xllcorner,
            self.yllcorner,
        )
    }

    pub fn to_topography(&self) -> (StructuredGrid, Topography) {
        let grid = self.to_grid();
        let topo = Topography { z: Field::from_fn(&grid, |i, j| self.value(i, j)) };
        (grid, topo)
    }

    /// Interpret the grid as an initial depth field.
    pub fn to_field(&self, grid: &StructuredGrid) -> Field {
        Field::from_fn(grid, |i, j| self.value(i, j))
    }
}

fn dem_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Dem { path: path.to_path_buf(), line, message: message.into() }
}

pub fn read_dem(path: impl AsRef<Path>) -> Result<DemGrid> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();

    let mut header = |expected: &str| -> Result<f64> {
        let (idx, line) = lines
            .next()
            .ok_or_else(|| dem_err(path, 0, format!("missing header line '{expected}'")))?;
        let mut parts = line.split_whitespace();
        let key = parts
            .next()
            .ok_or_else(|| dem_err(path, idx + 1, format!("empty line, expected '{expected}'")))?;
        if !key.eq_ignore_ascii_case(expected) {
            return Err(dem_err(path, idx + 1, format!("expected header '{expected}', found '{key}'")));
        }
        let value = parts
            .next()
            .ok_or_else(|| dem_err(path, idx + 1, format!("header '{expected}' has no value")))?;
        if parts.next().is_some() {
            return Err(dem_err(path, idx + 1, format!("trailing content after header '{expected}'")));
        }
        value
            .parse::<f64>()
            .map_err(|_| dem_err(path, idx + 1, format!("cannot parse '{value}' as a number")))
    };

    let ncols_f = header("ncols")?;
    let nrows_f = header("nrows")?;
    let xllcorner = header("xllcorner")?;
    let yllcorner = header("yllcorner")?;
    let cellsize = header("cellsize")?;
    let nodata_value = header("nodata_value")?;

    if ncols_f.fract() != 0.0 || ncols_f < 1.0 || nrows_f.fract() != 0.0 || nrows_f < 1.0 {
        return Err(dem_err(path, 1, "invalid dimension: ncols and nrows must be positive integers"));
    }
    let (ncols, nrows) = (ncols_f as usize, nrows_f as usize);
    if cellsize <= 0.0 {
        return Err(dem_err(path, 5, format!("cellsize must be positive, got {cellsize}")));
    }

    let mut values = vec![0.0; ncols * nrows];
    let mut rows_read = 0usize;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if rows_read == nrows {
            return Err(dem_err(path, idx + 1, format!("more than {nrows} data rows")));
        }
        // top row first in the file; flip so j grows northward
        let j = nrows - 1 - rows_read;
        let mut count = 0usize;
        for tok in line.split_whitespace() {
            if count == ncols {
                return Err(dem_err(path, idx + 1, format!("row has more than {ncols} values")));
            }
            let v = tok
                .parse::<f64>()
                .map_err(|_| dem_err(path, idx + 1, format!("cannot parse '{tok}' as a number")))?;
            if v == nodata_value {
                return Err(dem_err(
                    path,
                    idx + 1,
                    format!("NODATA value at column {count} inside the domain"),
                ));
            }
            if !v.is_finite() {
                return Err(dem_err(path, idx + 1, format!("non-finite value at column {count}")));
            }
            values[j * ncols + count] = v;
            count += 1;
        }
        if count != ncols {
            return Err(dem_err(path, idx + 1, format!("row has {count} values, expected {ncols}")));
        }
        rows_read += 1;
    }
    if rows_read != nrows {
        return Err(dem_err(path, 0, format!("found {rows_read} data rows, expected {nrows}")));
    }

    Ok(DemGrid { ncols, nrows, xllcorner, yllcorner, cellsize, nodata_value, values })
}

pub fn write_dem(dem: &DemGrid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str(&format!("ncols {}\n", dem.ncols));
    out.push_str(&format!("nrows {}\n", dem.nrows));
    out.push_str(&format!("xllcorner {}\n", dem.xllcorner));
    out.push_str(&format!("yllcorner {}\n", dem.yllcorner));
    out.push_str(&format!("cellsize {}\n", dem.cellsize));
    out.push_str(&format!("NODATA_value {}\n", dem.nodata_value));
    for j in (0..dem.nrows).rev() {
        for i in 0..dem.ncols {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&format!("{}", dem.value(i, j)));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
