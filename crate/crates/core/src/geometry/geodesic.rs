//! Shortest paths through interior pixels: 8-connected graph, Euclidean
//! edge lengths, diagonal steps only when both side neighbors are interior.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::Domain;
use crate::error::{QcError, Result};
use crate::field::GridSpec;

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    idx: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then(self.idx.cmp(&other.idx))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Interior pixel graph of a domain on a grid.
#[derive(Clone, Debug)]
pub struct GeodesicMap {
    grid: GridSpec,
    mask: Vec<bool>,
}

const STEPS: [(i64, i64); 8] = [(0, 1), (1, 0), (0, -1), (-1, 0), (1, 1), (1, -1), (-1, 1), (-1, -1)];

impl GeodesicMap {
    pub fn new(dom: &Domain, grid: &GridSpec) -> Self {
        Self::from_mask(*grid, dom.point_mask(grid))
    }

    pub fn from_mask(grid: GridSpec, mask: Vec<bool>) -> Self {
        assert_eq!(mask.len(), grid.len(), "mask size differs from grid");
        Self { grid, mask }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    fn neighbors(&self, idx: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let n = self.grid.n() as i64;
        let h = self.grid.spacing();
        let (r, c) = ((idx as i64) / n, (idx as i64) % n);
        STEPS.iter().filter_map(move |&(dr, dc)| {
            let (rr, cc) = (r + dr, c + dc);
            if rr < 0 || cc < 0 || rr >= n || cc >= n {
                return None;
            }
            let j = (rr * n + cc) as usize;
            if !self.mask[j] {
                return None;
            }
            if dr != 0 && dc != 0 {
                let side1 = (r * n + cc) as usize;
                let side2 = (rr * n + c) as usize;
                if !(self.mask[side1] && self.mask[side2]) {
                    return None;
                }
                Some((j, h * std::f64::consts::SQRT_2))
            } else {
                Some((j, h))
            }
        })
    }

    /// Distances from `source` to every node (infinite when unreachable),
    /// stopping early once `target` is settled.
    fn dijkstra(&self, source: usize, target: Option<usize>) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.grid.len()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Entry { dist: 0.0, idx: source });
        while let Some(Entry { dist: d, idx }) = heap.pop() {
            if d > dist[idx] {
                continue;
            }
            if Some(idx) == target {
                break;
            }
            for (j, w) in self.neighbors(idx) {
                let nd = d + w;
                if nd < dist[j] {
                    dist[j] = nd;
                    heap.push(Entry { dist: nd, idx: j });
                }
            }
        }
        dist
    }

    /// Full distance map from an interior node.
    pub fn distances_from(&self, source: usize) -> Vec<f64> {
        self.dijkstra(source, None)
    }

    /// Interior node nearest to `z` among the 3×3 block around it.
    pub fn snap(&self, z: Complex64) -> Option<usize> {
        let n = self.grid.n() as i64;
        let (r, c) = self.grid.fractional_index(z);
        let (r0, c0) = (r.round() as i64, c.round() as i64);
        let mut best: Option<(f64, usize)> = None;
        for dr in -1..=1 {
            for dc in -1..=1 {
                let (rr, cc) = (r0 + dr, c0 + dc);
                if rr < 0 || cc < 0 || rr >= n || cc >= n {
                    continue;
                }
                let j = (rr * n + cc) as usize;
                if !self.mask[j] {
                    continue;
                }
                let d = (self.grid.node_at(j) - z).norm();
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, j));
                }
            }
        }
        best.map(|(_, j)| j)
    }

    /// Path length between two points, including the straight legs to
    /// their snapped nodes.
    pub fn distance(&self, z: Complex64, w: Complex64) -> Result<f64> {
        let a = self
            .snap(z)
            .ok_or_else(|| QcError::OutsideDomain(format!("{z} has no interior pixel nearby")))?;
        let b = self
            .snap(w)
            .ok_or_else(|| QcError::OutsideDomain(format!("{w} has no interior pixel nearby")))?;
        let d = self.dijkstra(a, Some(b))[b];
        if !d.is_finite() {
            return Err(QcError::Disconnected);
        }
        Ok(d + (z - self.grid.node_at(a)).norm() + (w - self.grid.node_at(b)).norm())
    }
}

/// Geodesic distance inside `dom`, measured on the interior pixels of
/// `grid`.
pub fn geodesic_distance(dom: &Domain, z: Complex64, w: Complex64, grid: &GridSpec) -> Result<f64> {
    for p in [z, w] {
        if !dom.contains(p) {
            return Err(QcError::OutsideDomain(p.to_string()));
        }
    }
    if z == w {
        return Ok(0.0);
    }
    GeodesicMap::new(dom, grid).distance(z, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn convex_disc_is_euclidean() {
        let grid = GridSpec::new(c(0.0, 0.0), 2.0, 256).unwrap();
        let d = geodesic_distance(&Domain::unit_disc(), c(-0.5, 0.0), c(0.5, 0.0), &grid).unwrap();
        assert!((d - 1.0).abs() <= 2.0 * grid.spacing(), "{d}");
    }

    #[test]
    fn same_point_is_zero() {
        let grid = GridSpec::new(c(0.0, 0.0), 2.0, 64).unwrap();
        let z = c(0.1, 0.2);
        assert_eq!(geodesic_distance(&Domain::unit_disc(), z, z, &grid).unwrap(), 0.0);
    }

    #[test]
    fn peach_notch_forces_a_detour() {
        let grid = GridSpec::new(c(0.0, 0.0), 2.0, 512).unwrap();
        let (z, w) = (c(-0.3, 0.9), c(0.3, 0.9));
        let d = geodesic_distance(&Domain::peach(), z, w, &grid).unwrap();
        // every path passes below the cusp tip at i/2
        assert!(d >= 1.0 - 2.0 * grid.spacing(), "{d}");
        assert!(d < 1.15, "{d}");
    }

    #[test]
    fn rejects_outside_and_disconnected() {
        let grid = GridSpec::new(c(0.0, 0.0), 4.0, 128).unwrap();
        let dmtd = Domain::disc_minus_two_discs();
        assert!(matches!(
            geodesic_distance(&dmtd, c(1.0, 0.0), c(0.0, 1.5), &grid),
            Err(QcError::OutsideDomain(_))
        ));
        assert!(matches!(
            geodesic_distance(&dmtd, c(0.0, 1.5), c(0.0, -1.5), &grid),
            Err(QcError::Disconnected)
        ));
    }

    #[test]
    fn never_shorter_than_euclidean() {
        let grid = GridSpec::new(c(0.0, 0.0), 2.0, 128).unwrap();
        let dom = Domain::peach();
        let map = GeodesicMap::new(&dom, &grid);
        let pts = [c(0.0, -0.5), c(-0.6, 0.3), c(0.5, 0.6), c(0.2, 0.1)];
        for a in pts {
            for b in pts {
                let d = map.distance(a, b).unwrap();
                assert!(d >= (a - b).norm() - 2.0 * grid.spacing());
            }
        }
    }
}
