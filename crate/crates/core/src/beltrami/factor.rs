//! `Φ^μ = Φ_N ∘ … ∘ Φ_1`, one stage per part of μ.
//!
//! Stage `s` carries `λ_s(w) = μ_s(z)·Ψ'(z)/conj(Ψ'(z))` at `w = Ψ(z)`,
//! where `Ψ = Φ_{s−1} ∘ … ∘ Φ_1` is conformal on `Ω_s`. `λ_s` is sampled
//! by pulling image-grid nodes back through the earlier stages.

use num_complex::Complex64;
use rayon::prelude::*;

use super::map::{MapEvaluator, MapStage};
use super::{neumann_solve_field, BeltramiCoefficient, BeltramiPart, DEFAULT_MAX_TERMS};
use crate::error::{QcError, Result};
use crate::field::{Field, GridSpec};
use crate::transforms::SUPPORT_FRACTION;

/// Sub-samples per axis for nodes near the image boundary.
const EDGE_SUBSAMPLES: usize = 4;

/// Boundary samples used to bound the image of a part.
const IMAGE_BOUNDARY_SAMPLES: usize = 512;

/// Tolerance of the pull-back Newton solves, relative to the spacing.
const PULLBACK_TOL: f64 = 1e-9;

/// Pulls `w` back through `stages` (last to first), returning the preimage
/// and the rotation `Ψ'/conj(Ψ')` of the composed prefix there.
fn pull_back(stages: &[MapStage], w: Complex64, tol: f64, seed: Option<Complex64>) -> Option<(Complex64, Complex64)> {
    let mut p = w;
    let mut chain = Vec::with_capacity(stages.len());
    for (i, s) in stages.iter().enumerate().rev() {
        let guess = if i == 0 { seed.unwrap_or(p) } else { p };
        p = s.invert(p, tol, guess).ok()?;
        chain.push(p);
    }
    // Ψ' = Π ∂Φ_t at the successive intermediate points
    let mut rot = Complex64::new(1.0, 0.0);
    for (s, z) in stages.iter().zip(chain.iter().rev()) {
        let ev = |q: Complex64| s.eval(q);
        let h = 0.5 * s.correction().grid().spacing();
        let fx = (ev(z + h)? - ev(z - h)?) / (2.0 * h);
        let iy = Complex64::new(0.0, h);
        let fy = (ev(z + iy)? - ev(z - iy)?) / (2.0 * h);
        let d = (fx - Complex64::i() * fy) * 0.5;
        rot *= d / d.conj();
    }
    Some((p, rot))
}

/// Samples the pushed-forward coefficient of `part` on `grid`.
fn push_forward(stages: &[MapStage], part: &BeltramiPart, grid: &GridSpec, k: f64) -> Result<Field> {
    let ev = MapEvaluator::from_stages(stages.to_vec())?;
    let h = grid.spacing();
    let tol = PULLBACK_TOL * h;
    let boundary = match &part.domain {
        crate::geometry::Domain::DisjointUnion(_) => {
            return Err(QcError::InvalidDomain(
                "factor_solve parts must be single shapes".into(),
            ))
        }
        d => d.boundary_parametrization(IMAGE_BOUNDARY_SAMPLES)?,
    };
    let mut lo = Complex64::new(f64::MAX, f64::MAX);
    let mut hi = Complex64::new(f64::MIN, f64::MIN);
    for b in &boundary {
        let w = ev
            .eval_raw(b.point)
            .ok_or_else(|| QcError::OutsideReliableRegion(format!("image of {}", b.point)))?;
        lo = Complex64::new(lo.re.min(w.re), lo.im.min(w.im));
        hi = Complex64::new(hi.re.max(w.re), hi.im.max(w.im));
    }
    let lim = SUPPORT_FRACTION * grid.half_width();
    for corner in [lo, hi] {
        let d = corner - grid.center();
        if d.re.abs() > lim || d.im.abs() > lim {
            return Err(QcError::OutsideReliableRegion(format!(
                "image of a part reaches {corner}, outside the central quarter"
            )));
        }
    }
    let margin = 4.0 * h;
    let (r0, c0) = grid.fractional_index(lo - Complex64::new(margin, margin));
    let (r1, c1) = grid.fractional_index(hi + Complex64::new(margin, margin));
    let n = grid.n();
    let clamp = |v: f64| (v.max(0.0) as usize).min(n - 1);
    let (r0, r1, c0, c1) = (clamp(r0.floor()), clamp(r1.ceil()), clamp(c0.floor()), clamp(c1.ceil()));

    // preimages move by at most this much per unit of image distance
    let stretch = (1.0 + k) / (1.0 - k);
    let near = 2.0 * h * stretch;
    let dom = &part.domain;
    let rows: Vec<(usize, Vec<Complex64>)> = (r0..=r1)
        .into_par_iter()
        .map(|row| {
            let mut out = vec![Complex64::new(0.0, 0.0); c1 - c0 + 1];
            for (j, col) in (c0..=c1).enumerate() {
                let w = grid.node(row, col);
                let Some((z, rot)) = pull_back(stages, w, tol, None) else {
                    continue;
                };
                let inside = dom.contains(z);
                let weight = if dom.boundary_distance(z) > near {
                    if inside {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    let s = EDGE_SUBSAMPLES;
                    let mut hits = 0usize;
                    for a in 0..s {
                        for b in 0..s {
                            let off = Complex64::new(
                                h * ((a as f64 + 0.5) / s as f64 - 0.5),
                                h * ((b as f64 + 0.5) / s as f64 - 0.5),
                            );
                            if let Some((zs, _)) = pull_back(stages, w + off, tol, Some(z)) {
                                if dom.contains(zs) {
                                    hits += 1;
                                }
                            }
                        }
                    }
                    hits as f64 / (s * s) as f64
                };
                if weight > 0.0 {
                    out[j] = part.coefficient.at(z) * rot * weight;
                }
            }
            (row, out)
        })
        .collect();
    let mut vals = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (row, line) in rows {
        vals[grid.index(row, c0)..=grid.index(row, c1)].copy_from_slice(&line);
    }
    Field::new(*grid, vals)
}

/// Solves part by part and composes the stage maps.
pub fn factor_solve(mu: &BeltramiCoefficient, grid: &GridSpec, tol: f64) -> Result<MapEvaluator> {
    mu.check_support(grid)?;
    let parts = mu.parts();
    if parts.is_empty() {
        return Ok(MapEvaluator::new(neumann_solve_field(
            mu.clone(),
            Field::zeros(*grid),
            tol,
            DEFAULT_MAX_TERMS,
        )?));
    }
    let mut stages: Vec<MapStage> = Vec::with_capacity(parts.len());
    for part in parts {
        let single = BeltramiCoefficient::new(vec![part.clone()])?.with_rasterization(mu.rasterization());
        let lambda = if stages.is_empty() {
            single.rasterize(grid)
        } else {
            push_forward(&stages, part, grid, mu.k())?
        };
        let sol = neumann_solve_field(single, lambda, tol, DEFAULT_MAX_TERMS)?;
        stages.push(MapStage::new(sol));
    }
    MapEvaluator::from_stages(stages)
}
