use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{map_partials, Solution};
use crate::error::{QcError, Result};
use crate::field::{Field, GridSpec};
use crate::geometry::Domain;
use crate::transforms::cauchy;

/// Newton iterations allowed in [`invert_map`].
pub const NEWTON_MAX_ITERATIONS: usize = 50;

/// Φ is trusted on `center ± RELIABLE_FRACTION·half_width`.
pub const RELIABLE_FRACTION: f64 = 0.5;

/// One map `Φ = z + C(h)` with its cached correction field.
#[derive(Clone, Debug)]
pub struct MapStage {
    solution: Solution,
    correction: Field,
}

impl MapStage {
    pub fn new(solution: Solution) -> Self {
        let correction = cauchy(&solution.h);
        Self { solution, correction }
    }

    pub fn solution(&self) -> &Solution {
        &self.solution
    }

    /// `C(h)` on the grid.
    pub fn correction(&self) -> &Field {
        &self.correction
    }

    /// Bilinear `z + C(h)(z)`; `None` outside the node hull.
    pub fn eval(&self, z: Complex64) -> Option<Complex64> {
        self.correction.interpolate(z).map(|c| z + c)
    }

    pub fn invert(&self, w: Complex64, tol: f64, seed: Complex64) -> Result<Complex64> {
        newton(|z| self.eval(z), w, tol, seed, self.correction.grid().spacing())
    }
}

/// `Φ = Φ_N ∘ … ∘ Φ_1`, evaluated stage by stage.
#[derive(Clone, Debug)]
pub struct MapEvaluator {
    stages: Vec<MapStage>,
}

impl MapEvaluator {
    pub fn new(solution: Solution) -> Self {
        Self {
            stages: vec![MapStage::new(solution)],
        }
    }

    pub fn from_stages(stages: Vec<MapStage>) -> Result<Self> {
        let first = stages
            .first()
            .ok_or_else(|| QcError::InvalidArgument("map needs at least one stage".into()))?;
        let g = *first.correction.grid();
        if stages.iter().any(|s| *s.correction.grid() != g) {
            return Err(QcError::GridMismatch("map stages live on different grids".into()));
        }
        Ok(Self { stages })
    }

    pub fn stages(&self) -> &[MapStage] {
        &self.stages
    }

    pub fn grid(&self) -> &GridSpec {
        self.stages[0].correction.grid()
    }

    /// Φ at any point inside the node hull.
    pub fn eval_raw(&self, z: Complex64) -> Option<Complex64> {
        self.stages.iter().try_fold(z, |w, s| s.eval(w))
    }

    /// Φ on the reliable central half of the box.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if !self.grid().in_central(z, RELIABLE_FRACTION) {
            return Err(QcError::OutsideReliableRegion(z.to_string()));
        }
        self.eval_raw(z)
            .ok_or_else(|| QcError::OutsideReliableRegion(z.to_string()))
    }

    /// `(∂Φ, ∂̄Φ)` of the interpolated map by central differences.
    pub fn partials(&self, z: Complex64) -> Option<(Complex64, Complex64)> {
        fd_partials(&|p| self.eval_raw(p), z, 0.5 * self.grid().spacing())
    }

    /// Solves `Φ(z) = w` by damped Newton seeded at `w`.
    pub fn invert(&self, w: Complex64, tol: f64) -> Result<Complex64> {
        newton(|z| self.eval_raw(z), w, tol, w, self.grid().spacing())
    }
}

pub fn evaluate_map(ev: &MapEvaluator, z: Complex64) -> Result<Complex64> {
    ev.evaluate(z)
}

pub fn invert_map(ev: &MapEvaluator, w: Complex64, tol: f64) -> Result<Complex64> {
    ev.invert(w, tol)
}

fn fd_partials<F>(f: &F, z: Complex64, step: f64) -> Option<(Complex64, Complex64)>
where
    F: Fn(Complex64) -> Option<Complex64>,
{
    let dx = Complex64::new(step, 0.0);
    let dy = Complex64::new(0.0, step);
    let fx = (f(z + dx)? - f(z - dx)?) / (2.0 * step);
    let fy = (f(z + dy)? - f(z - dy)?) / (2.0 * step);
    let i = Complex64::i();
    Some(((fx - i * fy) * 0.5, (fx + i * fy) * 0.5))
}

fn newton<F>(f: F, w: Complex64, tol: f64, seed: Complex64, spacing: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Option<Complex64>,
{
    let fail = || QcError::InversionFailed(w.to_string());
    let mut z = seed;
    let mut r = f(z).ok_or_else(fail)? - w;
    for _ in 0..NEWTON_MAX_ITERATIONS {
        if r.norm() <= tol {
            return Ok(z);
        }
        let (a, b) = fd_partials(&f, z, 0.5 * spacing).ok_or_else(fail)?;
        let det = a.norm_sqr() - b.norm_sqr();
        if !(det > 0.0) {
            return Err(fail());
        }
        // solve a·δ + b·δ̄ = −r
        let delta = (a.conj() * (-r) - b * (-r).conj()) / det;
        let mut t = 1.0;
        loop {
            let cand = z + delta * t;
            if let Some(v) = f(cand) {
                let rc = v - w;
                if rc.norm() < r.norm() || t < 1.0 / 64.0 {
                    z = cand;
                    r = rc;
                    break;
                }
            }
            t *= 0.5;
            if t < 1.0 / 1024.0 {
                return Err(fail());
            }
        }
    }
    if r.norm() <= tol {
        Ok(z)
    } else {
        Err(fail())
    }
}

/// Minima of `J = |∂Φ|² − |∂̄Φ|²` and `|∂Φ|` away from `∂(region)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobianScan {
    pub min_jacobian: f64,
    pub min_dphi: f64,
    pub nodes: usize,
}

pub fn jacobian_scan(sol: &Solution, region: &Domain, band: f64) -> Result<JacobianScan> {
    let grid = sol.grid();
    if band < 4.0 * grid.spacing() * (1.0 - 1e-12) {
        return Err(QcError::InvalidArgument(format!(
            "band {band} is below four grid cells ({})",
            4.0 * grid.spacing()
        )));
    }
    let mask = region.interior_mask(grid, band);
    let (d, dbar) = map_partials(sol);
    let mut scan = JacobianScan {
        min_jacobian: f64::INFINITY,
        min_dphi: f64::INFINITY,
        nodes: 0,
    };
    for ((a, b), m) in d.values().iter().zip(dbar.values()).zip(&mask) {
        if *m {
            scan.min_jacobian = scan.min_jacobian.min(a.norm_sqr() - b.norm_sqr());
            scan.min_dphi = scan.min_dphi.min(a.norm());
            scan.nodes += 1;
        }
    }
    if scan.nodes == 0 {
        return Err(QcError::InsufficientSamples("no region nodes outside the band".into()));
    }
    Ok(scan)
}
