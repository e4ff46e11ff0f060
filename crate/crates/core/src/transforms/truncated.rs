//! `T^δ f(z) = ∫_{|y−z|>δ} f(y) K(z−y) dA(y)` by direct quadrature.
//!
//! Nodes farther than `δ + h` contribute their full cell; cells that may
//! straddle the circle `|y−z| = δ` are split into sub-points so the
//! annulus edge is resolved to a fraction of a cell.

use num_complex::Complex64;

use super::KernelDescriptor;
use crate::error::{QcError, Result};
use crate::field::Field;

/// Sub-points per axis in cells that straddle the truncation circle.
const EDGE_SUBDIVISION: usize = 8;

/// Contributions of every support node to `T^δ f(z)`, sorted by distance,
/// so that any number of truncation radii can be evaluated cheaply.
#[derive(Clone, Debug)]
pub struct TruncationProfile {
    z: Complex64,
    h: f64,
    /// `(distance, node, f(node))`, ascending in distance.
    nodes: Vec<(f64, Complex64, Complex64)>,
    /// `suffix[i]` = sum of full-cell contributions of `nodes[i..]`.
    suffix: Vec<Complex64>,
    kernel: KernelDescriptor,
}

impl TruncationProfile {
    pub fn new(f: &Field, k: &KernelDescriptor, z: Complex64) -> Self {
        let grid = f.grid();
        let h = grid.spacing();
        let mut nodes: Vec<(f64, Complex64, Complex64)> = f
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
            .map(|(i, v)| {
                let y = grid.node_at(i);
                ((z - y).norm(), y, *v)
            })
            .collect();
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut suffix = vec![Complex64::new(0.0, 0.0); nodes.len() + 1];
        for i in (0..nodes.len()).rev() {
            let (_, y, v) = nodes[i];
            suffix[i] = suffix[i + 1] + v * k.eval(z - y) * (h * h);
        }
        Self {
            z,
            h,
            nodes,
            suffix,
            kernel: k.clone(),
        }
    }

    pub fn point(&self) -> Complex64 {
        self.z
    }

    /// `T^δ f(z)`.
    pub fn eval(&self, delta: f64) -> Result<Complex64> {
        if !(delta >= self.h) {
            return Err(QcError::InvalidArgument(format!(
                "truncation radius {delta} is below the grid spacing {}",
                self.h
            )));
        }
        let h = self.h;
        // a cell of half-diagonal h/√2 can straddle the circle only if its
        // center lies within that of it
        let reach = h * std::f64::consts::FRAC_1_SQRT_2;
        let lo = self.nodes.partition_point(|n| n.0 < delta - reach);
        let hi = self.nodes.partition_point(|n| n.0 <= delta + reach);
        let mut acc = self.suffix[hi];
        let s = EDGE_SUBDIVISION;
        let w = h * h / (s * s) as f64;
        for &(_, y, v) in &self.nodes[lo..hi] {
            for a in 0..s {
                for b in 0..s {
                    let p = y + Complex64::new(
                        h * ((a as f64 + 0.5) / s as f64 - 0.5),
                        h * ((b as f64 + 0.5) / s as f64 - 0.5),
                    );
                    let d = self.z - p;
                    if d.norm() > delta {
                        acc += v * self.kernel.eval(d) * w;
                    }
                }
            }
        }
        Ok(acc)
    }
}

/// Truncated operator at a single point.
pub fn truncated(f: &Field, k: &KernelDescriptor, delta: f64, z: Complex64) -> Result<Complex64> {
    TruncationProfile::new(f, k, z).eval(delta)
}

/// `max_δ |T^δ f(z)|` over the given radii.
pub fn maximal(f: &Field, k: &KernelDescriptor, z: Complex64, deltas: &[f64]) -> Result<f64> {
    if deltas.is_empty() {
        return Err(QcError::InvalidArgument("maximal needs at least one radius".into()));
    }
    let profile = TruncationProfile::new(f, k, z);
    deltas
        .iter()
        .map(|d| profile.eval(*d).map(|v| v.norm()))
        .try_fold(0.0_f64, |m, v| v.map(|v| m.max(v)))
}
