//! Field files: a JSON header next to a flat data file.
//!
//! Binary data is little-endian `f64` pairs `(re, im)` in row-major order;
//! CSV data is one `re,im` line per node in the same order.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Field, GridSpec};
use crate::error::{QcError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldFormat {
    Binary,
    Csv,
}

impl FieldFormat {
    fn extension(self) -> &'static str {
        match self {
            FieldFormat::Binary => "bin",
            FieldFormat::Csv => "csv",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub center: [f64; 2],
    pub half_width: f64,
    pub n: usize,
    pub format: FieldFormat,
    /// Data file name, relative to the header's directory.
    pub data: String,
}

impl FieldHeader {
    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(Complex64::new(self.center[0], self.center[1]), self.half_width, self.n)
    }
}

/// Writes `<dir>/<stem>.json` and the data file; returns the header path.
pub fn write_field(field: &Field, dir: &Path, stem: &str, format: FieldFormat) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let data_name = format!("{stem}.{}", format.extension());
    let data_path = dir.join(&data_name);
    let mut w = BufWriter::new(fs::File::create(&data_path)?);
    match format {
        FieldFormat::Binary => {
            for v in field.values() {
                w.write_all(&v.re.to_le_bytes())?;
                w.write_all(&v.im.to_le_bytes())?;
            }
        }
        FieldFormat::Csv => {
            for v in field.values() {
                // `{:?}` prints the shortest representation that round-trips.
                writeln!(w, "{:?},{:?}", v.re, v.im)?;
            }
        }
    }
    w.flush()?;

    let g = field.grid();
    let header = FieldHeader {
        center: [g.center().re, g.center().im],
        half_width: g.half_width(),
        n: g.n(),
        format,
        data: data_name,
    };
    let header_path = dir.join(format!("{stem}.json"));
    fs::write(&header_path, serde_json::to_string_pretty(&header)?)?;
    Ok(header_path)
}

/// Reads a field from its JSON header path.
pub fn read_field(header_path: &Path) -> Result<Field> {
    let header: FieldHeader = serde_json::from_str(&fs::read_to_string(header_path)?)?;
    let grid = header.grid()?;
    let dir = header_path.parent().unwrap_or_else(|| Path::new("."));
    let data_path = dir.join(&header.data);
    let values = match header.format {
        FieldFormat::Binary => {
            let bytes = fs::read(&data_path)?;
            if bytes.len() != grid.len() * 16 {
                return Err(QcError::GridMismatch(format!(
                    "{} holds {} bytes, expected {}",
                    data_path.display(),
                    bytes.len(),
                    grid.len() * 16
                )));
            }
            bytes
                .chunks_exact(16)
                .map(|c| {
                    let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                    let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                    Complex64::new(re, im)
                })
                .collect()
        }
        FieldFormat::Csv => {
            let reader = BufReader::new(fs::File::open(&data_path)?);
            let mut values = Vec::with_capacity(grid.len());
            for (lineno, line) in reader.lines().enumerate() {
                let line = line?;
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let mut parts = line.split(',');
                let parse = |s: Option<&str>| -> Result<f64> {
                    s.and_then(|t| t.trim().parse().ok()).ok_or_else(|| {
                        QcError::Config(format!("bad CSV line {} in {}", lineno + 1, data_path.display()))
                    })
                };
                let re = parse(parts.next())?;
                let im = parse(parts.next())?;
                values.push(Complex64::new(re, im));
            }
            values
        }
    };
    Field::new(grid, values)
}
