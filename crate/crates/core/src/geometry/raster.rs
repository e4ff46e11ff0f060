use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Domain;
use crate::field::{Field, GridSpec};

/// How an indicator `χ_Ω` is sampled on a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rasterization {
    /// 1 at nodes inside Ω, 0 elsewhere.
    Point,
    /// Area fraction of the cell around each node, from `subrows` horizontal
    /// scanlines with exact interval overlap.
    Coverage { subrows: usize },
}

impl Default for Rasterization {
    fn default() -> Self {
        Rasterization::Coverage { subrows: 8 }
    }
}

impl Domain {
    /// Node membership computed from scanline intervals.
    pub fn point_mask(&self, grid: &GridSpec) -> Vec<bool> {
        let n = grid.n();
        let mut out = vec![false; grid.len()];
        out.par_chunks_mut(n).enumerate().for_each(|(row, line)| {
            let intervals = self.row_intervals(grid.y(row));
            for (col, v) in line.iter_mut().enumerate() {
                let x = grid.x(col);
                *v = intervals.iter().any(|&(a, b)| a < x && x < b);
            }
        });
        out
    }

    /// Sampled indicator of Ω.
    pub fn indicator(&self, grid: &GridSpec, raster: Rasterization) -> Field {
        let weights = match raster {
            Rasterization::Point => self
                .point_mask(grid)
                .into_iter()
                .map(|b| if b { 1.0 } else { 0.0 })
                .collect(),
            Rasterization::Coverage { subrows } => self.coverage(grid, subrows.max(1)),
        };
        Field::from_parts(*grid, weights.into_iter().map(|w| Complex64::new(w, 0.0)).collect())
    }

    fn coverage(&self, grid: &GridSpec, subrows: usize) -> Vec<f64> {
        let n = grid.n();
        let h = grid.spacing();
        let x0 = grid.x(0) - 0.5 * h;
        let mut out = vec![0.0; grid.len()];
        out.par_chunks_mut(n).enumerate().for_each(|(row, line)| {
            let yc = grid.y(row);
            let w = 1.0 / (subrows as f64 * h);
            for k in 0..subrows {
                let y = yc - 0.5 * h + (k as f64 + 0.5) * h / subrows as f64;
                for (a, b) in self.row_intervals(y) {
                    // cells [x0 + j h, x0 + (j+1) h]
                    let ja = ((a - x0) / h).floor().max(0.0) as usize;
                    let jb = (((b - x0) / h).ceil().max(0.0) as usize).min(n);
                    for (j, v) in line.iter_mut().enumerate().take(jb).skip(ja) {
                        let lo = x0 + j as f64 * h;
                        let overlap = (b.min(lo + h) - a.max(lo)).max(0.0);
                        *v += overlap * w;
                    }
                }
            }
        });
        out
    }

    /// Nodes of Ω at boundary distance greater than `band`.
    pub fn interior_mask(&self, grid: &GridSpec, band: f64) -> Vec<bool> {
        let inside = self.point_mask(grid);
        let near = self.near_boundary_mask(grid, band);
        inside.iter().zip(&near).map(|(a, b)| *a && !*b).collect()
    }

    /// Nodes within `band` of `∂Ω`.
    pub fn near_boundary_mask(&self, grid: &GridSpec, band: f64) -> Vec<bool> {
        if let Domain::DisjointUnion(members) = self {
            let mut out = vec![false; grid.len()];
            for m in members {
                for (o, v) in out.iter_mut().zip(m.near_boundary_mask(grid, band)) {
                    *o |= v;
                }
            }
            return out;
        }
        if self.has_analytic_distance() {
            let n = grid.n();
            let mut out = vec![false; grid.len()];
            out.par_chunks_mut(n).enumerate().for_each(|(row, line)| {
                for (col, v) in line.iter_mut().enumerate() {
                    *v = self.boundary_distance(grid.node(row, col)) <= band;
                }
            });
            return out;
        }
        self.stamp_boundary(grid, band)
    }

    /// Marks nodes within `band` of boundary samples spaced at most half a
    /// cell apart.
    fn stamp_boundary(&self, grid: &GridSpec, band: f64) -> Vec<bool> {
        let n = grid.n();
        let h = grid.spacing();
        let m = ((self.perimeter() / (0.5 * h)).ceil() as usize).clamp(256, 1 << 22);
        let samples: Vec<Complex64> = self
            .boundary_parametrization(m)
            .map(|b| b.into_iter().map(|p| p.point).collect())
            .unwrap_or_default();
        let mut out = vec![false; grid.len()];
        let reach = (band / h).ceil() as i64 + 1;
        for p in samples {
            let (r, c) = grid.fractional_index(p);
            let (r0, c0) = (r.round() as i64, c.round() as i64);
            for dr in -reach..=reach {
                for dc in -reach..=reach {
                    let (rr, cc) = (r0 + dr, c0 + dc);
                    if rr < 0 || cc < 0 || rr >= n as i64 || cc >= n as i64 {
                        continue;
                    }
                    let idx = rr as usize * n + cc as usize;
                    if !out[idx] && (grid.node(rr as usize, cc as usize) - p).norm() <= band {
                        out[idx] = true;
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::JordanCurve;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coverage_area_matches_exact_area() {
        let grid = GridSpec::new(c(0.0, 0.0), 4.0, 256).unwrap();
        let cases = [
            (Domain::unit_disc(), std::f64::consts::PI),
            (Domain::square(c(0.1, 0.2), 2.0).unwrap(), 4.0),
            (Domain::disc_minus_two_discs(), 2.0 * std::f64::consts::PI),
        ];
        for (d, area) in cases {
            let got = d.indicator(&grid, Rasterization::default()).integral().re;
            assert!((got - area).abs() / area < 2e-3, "{d:?}: {got}");
        }
    }

    #[test]
    fn coverage_lies_in_unit_interval() {
        let grid = GridSpec::new(c(0.0, 0.0), 2.0, 64).unwrap();
        let f = Domain::peach().indicator(&grid, Rasterization::default());
        assert!(f
            .values()
            .iter()
            .all(|v| v.re >= 0.0 && v.re <= 1.0 + 1e-12 && v.im == 0.0));
    }

    #[test]
    fn point_mask_matches_contains() {
        let grid = GridSpec::new(c(0.0, 0.0), 2.0, 64).unwrap();
        let d = Domain::SmoothJordan(JordanCurve::ellipse(c(0.0, 0.0), 1.2, 0.6, 128).unwrap());
        let mask = d.point_mask(&grid);
        for (i, m) in mask.iter().enumerate() {
            assert_eq!(*m, d.contains(grid.node_at(i)));
        }
    }

    #[test]
    fn interior_mask_respects_band() {
        let grid = GridSpec::new(c(0.0, 0.0), 2.0, 128).unwrap();
        let band = 4.0 * grid.spacing();
        for d in [Domain::unit_disc(), Domain::drop_shape(), Domain::peach()] {
            let mask = d.interior_mask(&grid, band);
            assert!(mask.iter().any(|m| *m));
            for (i, m) in mask.iter().enumerate() {
                if *m {
                    let z = grid.node_at(i);
                    assert!(d.contains(z));
                    assert!(d.boundary_distance(z) > band - 0.5 * grid.spacing(), "{d:?} {z}");
                }
            }
        }
    }
}
