//! CSV formats: signals as `x,re,im` and tabulated symbols as `r,re,im`.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiplier::TabulatedProfile;
use crate::spectral::{SampledSignal, SpatialGrid};

/// Relative tolerance when matching CSV abscissae to a grid layout.
pub const LAYOUT_TOL: f64 = 1e-9;

#[derive(Debug, Serialize, Deserialize)]
struct SignalRow {
    x: f64,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SymbolRow {
    r: f64,
    re: f64,
    im: f64,
}

fn rows<T: for<'de> Deserialize<'de>>(reader: impl Read) -> Result<Vec<T>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Reads a signal; the `x` column must be `−x_max + j·Δx` for a power-of-two
/// number of rows. When `grid` is given the layout must match it.
pub fn read_signal(reader: impl Read, grid: Option<SpatialGrid>) -> Result<SampledSignal> {
    let rows: Vec<SignalRow> = rows(reader)?;
    let n = rows.len();
    let inferred = match grid {
        Some(g) => {
            if g.n() != n {
                return Err(Error::GridMismatch(format!("{n} rows but the grid has {} points", g.n())));
            }
            g
        }
        None => {
            let x0 = rows.first().map(|r| r.x).unwrap_or(0.0);
            SpatialGrid::new(n, -x0).map_err(|e| Error::Parse(format!("signal layout: {e}")))?
        }
    };
    for (j, row) in rows.iter().enumerate() {
        let expected = inferred.x(j);
        if (row.x - expected).abs() > LAYOUT_TOL * inferred.x_max() {
            return Err(Error::GridMismatch(format!(
                "row {j}: x = {} but the grid expects {expected}",
                row.x
            )));
        }
    }
    let values = rows.iter().map(|r| Complex64::new(r.re, r.im)).collect();
    SampledSignal::new(inferred, values).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_signal(writer: impl Write, signal: &SampledSignal) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let grid = signal.grid();
    for (j, v) in signal.values().iter().enumerate() {
        w.serialize(SignalRow { x: grid.x(j), re: v.re, im: v.im })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_symbol(reader: impl Read) -> Result<TabulatedProfile> {
    let rows: Vec<SymbolRow> = rows(reader)?;
    let r: Vec<f64> = rows.iter().map(|row| row.r).collect();
    let values: Vec<Complex64> = rows.iter().map(|row| Complex64::new(row.re, row.im)).collect();
    TabulatedProfile::new(&r, &values).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_symbol(writer: impl Write, profile: &TabulatedProfile) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for (r, v) in profile.radii().into_iter().zip(profile.values()) {
        w.serialize(SymbolRow { r, re: v.re, im: v.im })?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_signal(path: &Path, grid: Option<SpatialGrid>) -> Result<SampledSignal> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_signal(std::io::BufReader::new(file), grid)
}

pub fn load_symbol(path: &Path) -> Result<TabulatedProfile> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_symbol(std::io::BufReader::new(file))
}
