//! Domain description files.
//!
//! ```json
//! {"shape": "disc", "center": [0, 0], "radius": 1}
//! {"shape": "square", "center": [0, 0], "side": 2}
//! {"shape": "ellipse", "center": [0, 0], "a": 1, "b": 0.5, "samples": 512}
//! {"shape": "smooth_jordan", "points_csv": "curve.csv", "epsilon": 0.5}
//! {"shape": "drop"} / {"shape": "peach"} / {"shape": "disc_minus_two_discs"}
//! {"shape": "union", "members": [ ... ]}
//! ```
//!
//! Jordan CSV rows are `x,y` or `x,y,tx,ty`; a header line is skipped.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CuspModel, Domain, JordanCurve};
use crate::error::{QcError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Disc {
        center: [f64; 2],
        radius: f64,
    },
    Square {
        center: [f64; 2],
        side: f64,
    },
    Ellipse {
        center: [f64; 2],
        a: f64,
        b: f64,
        #[serde(default = "default_ellipse_samples")]
        samples: usize,
    },
    SmoothJordan {
        #[serde(default)]
        points: Option<Vec<[f64; 2]>>,
        #[serde(default)]
        points_csv: Option<String>,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
    Drop,
    Peach,
    DiscMinusTwoDiscs,
    Union {
        members: Vec<DomainSpec>,
    },
}

fn default_ellipse_samples() -> usize {
    512
}

fn default_epsilon() -> f64 {
    1.0
}

fn pt(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl DomainSpec {
    /// Builds the domain; relative CSV paths resolve against `base_dir`.
    pub fn build(&self, base_dir: &Path) -> Result<Domain> {
        match self {
            DomainSpec::Disc { center, radius } => Domain::disc(pt(*center), *radius),
            DomainSpec::Square { center, side } => Domain::square(pt(*center), *side),
            DomainSpec::Ellipse { center, a, b, samples } => Ok(Domain::SmoothJordan(JordanCurve::ellipse(
                pt(*center),
                *a,
                *b,
                *samples,
            )?)),
            DomainSpec::SmoothJordan {
                points,
                points_csv,
                epsilon,
            } => {
                let (pts, tangents) = match (points, points_csv) {
                    (Some(p), None) => (p.iter().copied().map(pt).collect(), None),
                    (None, Some(path)) => read_curve_csv(&base_dir.join(path))?,
                    _ => {
                        return Err(QcError::Config(
                            "smooth_jordan needs exactly one of `points` or `points_csv`".into(),
                        ))
                    }
                };
                Ok(Domain::SmoothJordan(JordanCurve::new(pts, tangents, *epsilon)?))
            }
            DomainSpec::Drop => Ok(Domain::Cuspidal(CuspModel::Drop)),
            DomainSpec::Peach => Ok(Domain::Cuspidal(CuspModel::Peach)),
            DomainSpec::DiscMinusTwoDiscs => Ok(Domain::Cuspidal(CuspModel::DiscMinusTwoDiscs)),
            DomainSpec::Union { members } => {
                let built = members.iter().map(|m| m.build(base_dir)).collect::<Result<Vec<_>>>()?;
                Domain::disjoint_union(built)
            }
        }
    }

    pub fn from_file(path: &Path) -> Result<Domain> {
        let spec: DomainSpec = serde_json::from_str(&fs::read_to_string(path)?)?;
        spec.build(path.parent().unwrap_or_else(|| Path::new(".")))
    }
}

type CurveSamples = (Vec<Complex64>, Option<Vec<Complex64>>);

fn read_curve_csv(path: &Path) -> Result<CurveSamples> {
    let text = fs::read_to_string(path)
        .map_err(|e| QcError::Config(format!("cannot read curve CSV {}: {e}", path.display())))?;
    let mut points = Vec::new();
    let mut tangents = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let nums: Option<Vec<f64>> = cols.iter().map(|s| s.parse().ok()).collect();
        let Some(nums) = nums else {
            if lineno == 0 {
                continue;
            }
            return Err(QcError::Config(format!(
                "{}:{}: not numeric",
                path.display(),
                lineno + 1
            )));
        };
        match nums.len() {
            2 => points.push(Complex64::new(nums[0], nums[1])),
            4 => {
                points.push(Complex64::new(nums[0], nums[1]));
                tangents.push(Complex64::new(nums[2], nums[3]));
            }
            k => {
                return Err(QcError::Config(format!(
                    "{}:{}: expected 2 or 4 columns, got {k}",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    if !tangents.is_empty() && tangents.len() != points.len() {
        return Err(QcError::Config(format!(
            "{}: mixed 2- and 4-column rows",
            path.display()
        )));
    }
    Ok((points, (!tangents.is_empty()).then_some(tangents)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parses_tagged_shapes() {
        let d: DomainSpec = serde_json::from_str(r#"{"shape":"disc","center":[0,0],"radius":1}"#).unwrap();
        assert_eq!(d.build(Path::new(".")).unwrap(), Domain::unit_disc());
        let u: DomainSpec = serde_json::from_str(
            r#"{"shape":"union","members":[{"shape":"disc","center":[-2,0],"radius":0.5},{"shape":"disc","center":[2,0],"radius":0.5}]}"#,
        )
        .unwrap();
        assert!(matches!(u.build(Path::new(".")).unwrap(), Domain::DisjointUnion(m) if m.len() == 2));
        let bad: std::result::Result<DomainSpec, _> = serde_json::from_str(r#"{"shape":"triangle"}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn reads_jordan_csv() {
        let dir = tempfile::tempdir().unwrap();
        let mut f = fs::File::create(dir.path().join("c.csv")).unwrap();
        writeln!(f, "x,y").unwrap();
        for k in 0..100 {
            let t = std::f64::consts::TAU * k as f64 / 100.0;
            writeln!(f, "{},{}", 1.5 * t.cos(), t.sin()).unwrap();
        }
        drop(f);
        let spec = DomainSpec::SmoothJordan {
            points: None,
            points_csv: Some("c.csv".into()),
            epsilon: 0.5,
        };
        let d = spec.build(dir.path()).unwrap();
        assert!(d.contains(Complex64::new(1.2, 0.0)));
        assert!(!d.contains(Complex64::new(0.0, 1.2)));
    }
}
