//! Problem files and solution archives.
//!
//! ```json
//! {
//!   "grid": {"center": [0, 0], "half_width": 4, "n": 1024},
//!   "parts": [
//!     {"domain": {"shape": "disc", "center": [0, 0], "radius": 1},
//!      "coefficient": {"constant": [0.5, 0]}},
//!     {"domain": {"shape": "square", "center": [1.5, 0], "side": 0.5},
//!      "coefficient": {"field": "mu2.json"}}
//!   ],
//!   "tol": 1e-8,
//!   "max_terms": 200
//! }
//! ```
//!
//! An archive directory holds `solution.json` plus the `h` and `mu` fields.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BeltramiCoefficient, BeltramiPart, Coefficient, Solution, DEFAULT_MAX_TERMS, DEFAULT_TOL};
use crate::error::{QcError, Result};
use crate::field::{read_field, write_field, Field, FieldFormat, GridSpec};
use crate::geometry::{DomainSpec, Rasterization};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub center: [f64; 2],
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_n")]
    pub n: usize,
}

fn default_half_width() -> f64 {
    4.0
}

fn default_n() -> usize {
    1024
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            center: [0.0, 0.0],
            half_width: default_half_width(),
            n: default_n(),
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<GridSpec> {
        GridSpec::new(Complex64::new(self.center[0], self.center[1]), self.half_width, self.n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientSpec {
    Constant([f64; 2]),
    /// Header path of a field file, relative to the problem file.
    Field(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartSpec {
    pub domain: DomainSpec,
    pub coefficient: CoefficientSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub parts: Vec<PartSpec>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_terms")]
    pub max_terms: usize,
    #[serde(default)]
    pub rasterization: Rasterization,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_max_terms() -> usize {
    DEFAULT_MAX_TERMS
}

impl ProblemSpec {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| QcError::Config(format!("cannot read problem file {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| QcError::Config(format!("{}: {e}", path.display())))
    }

    /// Builds μ; relative paths resolve against `base_dir`.
    pub fn coefficient(&self, base_dir: &Path) -> Result<BeltramiCoefficient> {
        let parts = self
            .parts
            .iter()
            .map(|p| {
                let coefficient = match &p.coefficient {
                    CoefficientSpec::Constant([re, im]) => Coefficient::Constant(Complex64::new(*re, *im)),
                    CoefficientSpec::Field(path) => Coefficient::Field(read_field(&base_dir.join(path))?),
                };
                Ok(BeltramiPart {
                    domain: p.domain.build(base_dir)?,
                    coefficient,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if parts.is_empty() {
            return Ok(BeltramiCoefficient::zero().with_rasterization(self.rasterization));
        }
        Ok(BeltramiCoefficient::new(parts)?.with_rasterization(self.rasterization))
    }
}

/// Contents of `solution.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionDiagnostics {
    pub grid: GridConfig,
    pub k: f64,
    pub tol: f64,
    pub terms_used: usize,
    pub term_norms: Vec<f64>,
    pub residual: f64,
    /// Header file names of the stored fields.
    pub h: String,
    pub mu: String,
}

/// A solution as read back from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionArchive {
    pub diagnostics: SolutionDiagnostics,
    pub h: Field,
    pub mu: Field,
}

/// Writes `solution.json`, `h.*` and `mu.*` into `dir`; returns the
/// diagnostics path.
pub fn write_solution_archive(sol: &Solution, dir: &Path) -> Result<PathBuf> {
    write_field(&sol.h, dir, "h", FieldFormat::Binary)?;
    write_field(&sol.mu, dir, "mu", FieldFormat::Binary)?;
    let g = sol.grid();
    let diag = SolutionDiagnostics {
        grid: GridConfig {
            center: [g.center().re, g.center().im],
            half_width: g.half_width(),
            n: g.n(),
        },
        k: sol.k(),
        tol: sol.tol,
        terms_used: sol.terms_used,
        term_norms: sol.term_norms.clone(),
        residual: sol.residual,
        h: "h.json".into(),
        mu: "mu.json".into(),
    };
    let path = dir.join("solution.json");
    fs::write(&path, serde_json::to_string_pretty(&diag)?)?;
    Ok(path)
}

pub fn read_solution_archive(dir: &Path) -> Result<SolutionArchive> {
    let diagnostics: SolutionDiagnostics = serde_json::from_str(&fs::read_to_string(dir.join("solution.json"))?)?;
    let h = read_field(&dir.join(&diagnostics.h))?;
    let mu = read_field(&dir.join(&diagnostics.mu))?;
    if *h.grid() != diagnostics.grid.build()? {
        return Err(QcError::GridMismatch("archive header and h field disagree".into()));
    }
    h.check_same_grid(&mu)?;
    Ok(SolutionArchive { diagnostics, h, mu })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beltrami::neumann_solve;

    #[test]
    fn problem_file_round_trip() {
        let text = r#"{
            "grid": {"n": 64},
            "parts": [{"domain": {"shape": "disc", "center": [0, 0], "radius": 1},
                       "coefficient": {"constant": [0.5, 0]}}]
        }"#;
        let spec: ProblemSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.grid.half_width, 4.0);
        assert_eq!(spec.tol, DEFAULT_TOL);
        let mu = spec.coefficient(Path::new(".")).unwrap();
        assert_eq!(mu.k(), 0.5);
        let again: ProblemSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(again, spec);
        assert!(serde_json::from_str::<ProblemSpec>(r#"{"grid": {"m": 3}}"#).is_err());
    }

    #[test]
    fn field_coefficient_is_read_relative_to_the_problem() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::new(Complex64::new(0.0, 0.0), 4.0, 32).unwrap();
        write_field(
            &Field::constant(g, Complex64::new(0.25, 0.0)),
            dir.path(),
            "m",
            FieldFormat::Csv,
        )
        .unwrap();
        let spec: ProblemSpec = serde_json::from_str(
            r#"{"parts": [{"domain": {"shape": "square", "center": [0, 0], "side": 1},
                           "coefficient": {"field": "m.json"}}]}"#,
        )
        .unwrap();
        let mu = spec.coefficient(dir.path()).unwrap();
        assert!((mu.k() - 0.25).abs() < 1e-15);
        assert!(spec.coefficient(Path::new("/nonexistent")).is_err());
    }

    #[test]
    fn archive_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::new(Complex64::new(0.0, 0.0), 4.0, 64).unwrap();
        let mu = BeltramiCoefficient::constant(crate::geometry::Domain::unit_disc(), Complex64::new(0.3, 0.1)).unwrap();
        let sol = neumann_solve(&mu, &g, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
        write_solution_archive(&sol, dir.path()).unwrap();
        let back = read_solution_archive(dir.path()).unwrap();
        assert_eq!(back.h, sol.h);
        assert_eq!(back.mu, sol.mu);
        assert_eq!(back.diagnostics.term_norms, sol.term_norms);
        assert_eq!(back.diagnostics.residual, sol.residual);
    }
}
