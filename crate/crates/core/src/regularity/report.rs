//! Refinement-trace reports: CSV with one row per level and a JSON summary.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: usize,
    pub spacing: f64,
    /// Named measurements at this level, in a fixed column order.
    pub values: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub quantity: String,
    pub seed: u64,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub rows: Vec<TraceRow>,
    pub flags: BTreeMap<String, bool>,
}

pub fn write_trace_csv(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    let columns: Vec<&String> = rows.first().map(|r| r.values.keys().collect()).unwrap_or_default();
    write!(w, "n,spacing")?;
    for c in &columns {
        write!(w, ",{c}")?;
    }
    writeln!(w)?;
    for r in rows {
        write!(w, "{},{:?}", r.n, r.spacing)?;
        for c in &columns {
            match r.values.get(*c) {
                Some(v) => write!(w, ",{v:?}")?,
                None => write!(w, ",")?,
            }
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace_json(path: &Path, report: &TraceReport) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(report)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_columns_follow_the_first_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let row = |n: usize, v: f64| TraceRow {
            n,
            spacing: 8.0 / n as f64,
            values: BTreeMap::from([("lower".to_string(), v), ("upper".to_string(), 2.0 * v)]),
        };
        write_trace_csv(&p, &[row(256, 0.5), row(512, 0.25)]).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "n,spacing,lower,upper");
        assert_eq!(lines[2], "512,0.015625,0.25,0.5");
    }
}
