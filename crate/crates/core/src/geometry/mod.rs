//! Planar domains: discs, squares, smooth Jordan polygons, the cuspidal
//! models and disjoint unions of these.
//!
//! Boundary points are classified as exterior everywhere in this module.

mod boundary;
mod geodesic;
mod raster;
mod spec;

pub use boundary::BoundaryPoint;
pub use geodesic::{geodesic_distance, GeodesicMap};
pub use raster::Rasterization;
pub use spec::DomainSpec;

use num_complex::Complex64;

use crate::error::{QcError, Result};
use crate::field::GridSpec;

/// Cusp examples with closed-form membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CuspModel {
    /// `{0 < x < 1, y² < x³(1−x)}`: interior cusp at the origin.
    Drop,
    /// Unit disc minus the closed notch `{y ≥ ½, |x| ≤ (y−½)^{3/2}}`:
    /// exterior cusp at `i/2`.
    Peach,
    /// `D(0,2) \ (D̄(−1,1) ∪ D̄(1,1))`: exterior cusp at the origin.
    DiscMinusTwoDiscs,
}

/// Closed simple polyline, positively oriented, with unit tangents.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanCurve {
    points: Vec<Complex64>,
    tangents: Vec<Complex64>,
    epsilon: f64,
}

/// Minimum number of samples of a [`JordanCurve`].
pub const MIN_JORDAN_SAMPLES: usize = 64;

impl JordanCurve {
    /// Validates and orients a closed polyline. Tangents default to
    /// normalized central differences.
    pub fn new(points: Vec<Complex64>, tangents: Option<Vec<Complex64>>, epsilon: f64) -> Result<Self> {
        let m = points.len();
        if m < MIN_JORDAN_SAMPLES {
            return Err(QcError::InvalidDomain(format!(
                "smooth Jordan curve needs >= {MIN_JORDAN_SAMPLES} samples, got {m}"
            )));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(QcError::InvalidDomain(format!(
                "smoothness exponent must lie in (0, 1], got {epsilon}"
            )));
        }
        if let Some(t) = &tangents {
            if t.len() != m {
                return Err(QcError::InvalidDomain("tangent count differs from point count".into()));
            }
        }
        if points.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(QcError::InvalidDomain("non-finite boundary point".into()));
        }
        if let Some((i, j)) = first_self_intersection(&points) {
            return Err(QcError::InvalidDomain(format!(
                "polyline self-intersects between edges {i} and {j}"
            )));
        }
        let mut points = points;
        let mut tangents = tangents;
        if signed_area(&points) < 0.0 {
            points.reverse();
            if let Some(t) = tangents.as_mut() {
                t.reverse();
                t.iter_mut().for_each(|v| *v = -*v);
            }
        }
        let tangents = match tangents {
            Some(t) => t
                .into_iter()
                .map(|v| {
                    let n = v.norm();
                    if n > 0.0 {
                        Ok(v / n)
                    } else {
                        Err(QcError::InvalidDomain("zero tangent".into()))
                    }
                })
                .collect::<Result<Vec<_>>>()?,
            None => (0..m)
                .map(|k| {
                    let d = points[(k + 1) % m] - points[(k + m - 1) % m];
                    d / d.norm()
                })
                .collect(),
        };
        Ok(Self {
            points,
            tangents,
            epsilon,
        })
    }

    /// Ellipse with semi-axes `a` (x) and `b` (y), sampled at `m` points.
    pub fn ellipse(center: Complex64, a: f64, b: f64, m: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(QcError::InvalidDomain("ellipse semi-axes must be positive".into()));
        }
        let (points, tangents) = (0..m)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / m as f64;
                let p = center + Complex64::new(a * t.cos(), b * t.sin());
                let d = Complex64::new(-a * t.sin(), b * t.cos());
                (p, d / d.norm())
            })
            .unzip();
        Self::new(points, Some(tangents), 1.0)
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn tangents(&self) -> &[Complex64] {
        &self.tangents
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn edges(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let m = self.points.len();
        (0..m).map(move |k| (self.points[k], self.points[(k + 1) % m]))
    }
}

fn signed_area(points: &[Complex64]) -> f64 {
    let m = points.len();
    0.5 * (0..m)
        .map(|k| {
            let (a, b) = (points[k], points[(k + 1) % m]);
            a.re * b.im - b.re * a.im
        })
        .sum::<f64>()
}

fn segments_intersect(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let cross = |o: Complex64, a: Complex64, b: Complex64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn first_self_intersection(points: &[Complex64]) -> Option<(usize, usize)> {
    let m = points.len();
    for i in 0..m {
        let (a1, a2) = (points[i], points[(i + 1) % m]);
        for j in (i + 2)..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            if segments_intersect(a1, a2, points[j], points[(j + 1) % m]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// A planar domain.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Disc {
        center: Complex64,
        radius: f64,
    },
    /// Axis-aligned square of the given side.
    Square {
        center: Complex64,
        side: f64,
    },
    SmoothJordan(JordanCurve),
    Cuspidal(CuspModel),
    DisjointUnion(Vec<Domain>),
}

/// Resolution of the pixel test used to check disjointness of unions.
const DISJOINT_CHECK_N: usize = 512;

/// Samples used for polyline distances of the cusp models.
const DENSE_BOUNDARY_SAMPLES: usize = 4096;

impl Domain {
    pub fn disc(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(QcError::InvalidDomain(format!("radius must be positive, got {radius}")));
        }
        Ok(Domain::Disc { center, radius })
    }

    pub fn square(center: Complex64, side: f64) -> Result<Self> {
        if !(side > 0.0) {
            return Err(QcError::InvalidDomain(format!("side must be positive, got {side}")));
        }
        Ok(Domain::Square { center, side })
    }

    pub fn unit_disc() -> Self {
        Domain::Disc {
            center: Complex64::new(0.0, 0.0),
            radius: 1.0,
        }
    }

    pub fn drop_shape() -> Self {
        Domain::Cuspidal(CuspModel::Drop)
    }

    pub fn peach() -> Self {
        Domain::Cuspidal(CuspModel::Peach)
    }

    pub fn disc_minus_two_discs() -> Self {
        Domain::Cuspidal(CuspModel::DiscMinusTwoDiscs)
    }

    /// Disjoint union, checked by pixel sampling over the members'
    /// bounding box.
    pub fn disjoint_union(members: Vec<Domain>) -> Result<Self> {
        if members.is_empty() {
            return Err(QcError::InvalidDomain("empty union".into()));
        }
        let (lo, hi) = members.iter().map(Domain::bounding_box).fold(
            (Complex64::new(f64::MAX, f64::MAX), Complex64::new(f64::MIN, f64::MIN)),
            |(lo, hi), (a, b)| {
                (
                    Complex64::new(lo.re.min(a.re), lo.im.min(a.im)),
                    Complex64::new(hi.re.max(b.re), hi.im.max(b.im)),
                )
            },
        );
        let half = 0.5 * (hi.re - lo.re).max(hi.im - lo.im) * 1.01;
        let grid = GridSpec::new((lo + hi) * 0.5, half, DISJOINT_CHECK_N)?;
        Self::check_disjoint(&members, &grid)?;
        Ok(Domain::DisjointUnion(members))
    }

    /// Fails when two members share a pixel of `grid`.
    pub fn check_disjoint(members: &[Domain], grid: &GridSpec) -> Result<()> {
        let masks: Vec<Vec<bool>> = members.iter().map(|d| d.point_mask(grid)).collect();
        for i in 0..masks.len() {
            for j in (i + 1)..masks.len() {
                if masks[i].iter().zip(&masks[j]).any(|(a, b)| *a && *b) {
                    return Err(QcError::InvalidDomain(format!("union members {i} and {j} overlap")));
                }
            }
        }
        Ok(())
    }

    /// True iff `z` is in the open interior.
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Domain::Disc { center, radius } => (z - center).norm() < *radius,
            Domain::Square { center, side } => {
                let d = z - center;
                d.re.abs() < side / 2.0 && d.im.abs() < side / 2.0
            }
            Domain::SmoothJordan(curve) => {
                let mut inside = false;
                for (a, b) in curve.edges() {
                    if (a.im > z.im) != (b.im > z.im) {
                        let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
                        if x == z.re {
                            return false;
                        }
                        if x > z.re {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
            Domain::Cuspidal(CuspModel::Drop) => z.re > 0.0 && z.re < 1.0 && z.im * z.im < z.re.powi(3) * (1.0 - z.re),
            Domain::Cuspidal(CuspModel::Peach) => {
                z.norm() < 1.0 && !(z.im >= 0.5 && z.re.abs() <= (z.im - 0.5).powf(1.5))
            }
            Domain::Cuspidal(CuspModel::DiscMinusTwoDiscs) => {
                z.norm() < 2.0 && (z - 1.0).norm() > 1.0 && (z + 1.0).norm() > 1.0
            }
            Domain::DisjointUnion(members) => members.iter().any(|d| d.contains(z)),
        }
    }

    /// Axis-aligned bounding box `(lower-left, upper-right)`.
    pub fn bounding_box(&self) -> (Complex64, Complex64) {
        let c = |x: f64, y: f64| Complex64::new(x, y);
        match self {
            Domain::Disc { center, radius } => (center - c(*radius, *radius), center + c(*radius, *radius)),
            Domain::Square { center, side } => (center - c(side / 2.0, side / 2.0), center + c(side / 2.0, side / 2.0)),
            Domain::SmoothJordan(curve) => curve
                .points
                .iter()
                .fold((c(f64::MAX, f64::MAX), c(f64::MIN, f64::MIN)), |(lo, hi), p| {
                    (c(lo.re.min(p.re), lo.im.min(p.im)), c(hi.re.max(p.re), hi.im.max(p.im)))
                }),
            Domain::Cuspidal(CuspModel::Drop) => (c(0.0, -0.33), c(1.0, 0.33)),
            Domain::Cuspidal(CuspModel::Peach) => (c(-1.0, -1.0), c(1.0, 1.0)),
            Domain::Cuspidal(CuspModel::DiscMinusTwoDiscs) => (c(-2.0, -2.0), c(2.0, 2.0)),
            Domain::DisjointUnion(members) => members
                .iter()
                .map(Domain::bounding_box)
                .fold((c(f64::MAX, f64::MAX), c(f64::MIN, f64::MIN)), |(lo, hi), (a, b)| {
                    (c(lo.re.min(a.re), lo.im.min(a.im)), c(hi.re.max(b.re), hi.im.max(b.im)))
                }),
        }
    }

    /// Largest distance from the grid-independent bounding-box center to
    /// the domain; used to check the central-quarter support rule.
    pub fn support_radius_about(&self, center: Complex64) -> f64 {
        let (lo, hi) = self.bounding_box();
        (lo.re - center.re)
            .abs()
            .max((hi.re - center.re).abs())
            .max((lo.im - center.im).abs())
            .max((hi.im - center.im).abs())
    }

    /// Open intervals `{x : (x, y) ∈ Ω}`, sorted and disjoint.
    pub fn row_intervals(&self, y: f64) -> Vec<(f64, f64)> {
        match self {
            Domain::Disc { center, radius } => disc_interval(*center, *radius, y).into_iter().collect(),
            Domain::Square { center, side } => {
                let h = side / 2.0;
                if (y - center.im).abs() < h {
                    vec![(center.re - h, center.re + h)]
                } else {
                    vec![]
                }
            }
            Domain::SmoothJordan(curve) => {
                let mut xs: Vec<f64> = curve
                    .edges()
                    .filter(|(a, b)| (a.im > y) != (b.im > y))
                    .map(|(a, b)| a.re + (y - a.im) * (b.re - a.re) / (b.im - a.im))
                    .collect();
                xs.sort_by(f64::total_cmp);
                xs.chunks_exact(2)
                    .filter(|p| p[1] > p[0])
                    .map(|p| (p[0], p[1]))
                    .collect()
            }
            Domain::Cuspidal(CuspModel::Drop) => drop_interval(y).into_iter().collect(),
            Domain::Cuspidal(CuspModel::Peach) => {
                let base: Vec<_> = disc_interval(Complex64::new(0.0, 0.0), 1.0, y).into_iter().collect();
                if y >= 0.5 {
                    let w = (y - 0.5).powf(1.5);
                    subtract_interval(&base, (-w, w))
                } else {
                    base
                }
            }
            Domain::Cuspidal(CuspModel::DiscMinusTwoDiscs) => {
                let mut out: Vec<_> = disc_interval(Complex64::new(0.0, 0.0), 2.0, y).into_iter().collect();
                for a in [-1.0, 1.0] {
                    if y.abs() <= 1.0 {
                        let w = (1.0 - y * y).sqrt();
                        out = subtract_interval(&out, (a - w, a + w));
                    }
                }
                out
            }
            Domain::DisjointUnion(members) => {
                let mut all: Vec<(f64, f64)> = members.iter().flat_map(|d| d.row_intervals(y)).collect();
                all.sort_by(|a, b| a.0.total_cmp(&b.0));
                all
            }
        }
    }

    /// Unsigned Euclidean distance from `z` to `∂Ω`.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        match self {
            Domain::Disc { center, radius } => ((z - center).norm() - radius).abs(),
            Domain::Square { center, side } => {
                let h = side / 2.0;
                let d = z - center;
                let (ax, ay) = (d.re.abs(), d.im.abs());
                if ax < h && ay < h {
                    (h - ax).min(h - ay)
                } else {
                    let ex = (ax - h).max(0.0);
                    let ey = (ay - h).max(0.0);
                    if ex > 0.0 && ey > 0.0 {
                        (ex * ex + ey * ey).sqrt()
                    } else if ex > 0.0 {
                        if ay <= h {
                            ex
                        } else {
                            ey
                        }
                    } else {
                        // on the boundary line, or just outside along one axis
                        (ay - h).abs().min((ax - h).abs()).max(ey)
                    }
                }
            }
            Domain::Cuspidal(CuspModel::DiscMinusTwoDiscs) => (z.norm() - 2.0)
                .abs()
                .min(((z - 1.0).norm() - 1.0).abs())
                .min(((z + 1.0).norm() - 1.0).abs()),
            Domain::SmoothJordan(curve) => polyline_distance(curve.points(), z),
            Domain::Cuspidal(_) => {
                let pts: Vec<Complex64> = self
                    .boundary_parametrization(DENSE_BOUNDARY_SAMPLES)
                    .expect("cusp models have a boundary")
                    .into_iter()
                    .map(|b| b.point)
                    .collect();
                polyline_distance(&pts, z)
            }
            Domain::DisjointUnion(members) => members
                .iter()
                .map(|d| d.boundary_distance(z))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// True for shapes whose boundary distance is evaluated in closed form.
    fn has_analytic_distance(&self) -> bool {
        match self {
            Domain::Disc { .. } | Domain::Square { .. } => true,
            Domain::Cuspidal(CuspModel::DiscMinusTwoDiscs) => true,
            Domain::DisjointUnion(m) => m.iter().all(Domain::has_analytic_distance),
            _ => false,
        }
    }

    /// Largest distance between two boundary samples.
    pub fn diameter(&self) -> f64 {
        let pts: Vec<Complex64> = match self {
            Domain::DisjointUnion(members) => members
                .iter()
                .flat_map(|d| d.boundary_parametrization(256).unwrap_or_default())
                .map(|b| b.point)
                .collect(),
            _ => self
                .boundary_parametrization(256)
                .unwrap_or_default()
                .into_iter()
                .map(|b| b.point)
                .collect(),
        };
        let mut best: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                best = best.max((a - b).norm());
            }
        }
        best
    }
}

fn disc_interval(center: Complex64, radius: f64, y: f64) -> Option<(f64, f64)> {
    let dy = y - center.im;
    if dy.abs() < radius {
        let w = (radius * radius - dy * dy).sqrt();
        Some((center.re - w, center.re + w))
    } else {
        None
    }
}

/// `{x ∈ (0,1) : y² < x³(1−x)}`; the profile peaks at `x = 3/4`.
fn drop_interval(y: f64) -> Option<(f64, f64)> {
    let g = |x: f64| x.powi(3) * (1.0 - x);
    let target = y * y;
    if target >= g(0.75) {
        return None;
    }
    if target == 0.0 {
        return Some((0.0, 1.0));
    }
    let bisect = |mut lo: f64, mut hi: f64, increasing: bool| {
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if (g(mid) > target) == increasing {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    Some((bisect(0.0, 0.75, true), bisect(0.75, 1.0, false)))
}

/// Removes the closed interval `cut` from open intervals.
fn subtract_interval(intervals: &[(f64, f64)], cut: (f64, f64)) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(intervals.len() + 1);
    for &(a, b) in intervals {
        if cut.1 < a || cut.0 > b {
            out.push((a, b));
            continue;
        }
        if cut.0 > a {
            out.push((a, cut.0));
        }
        if cut.1 < b {
            out.push((cut.1, b));
        }
    }
    out
}

fn segment_distance(a: Complex64, b: Complex64, z: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

fn polyline_distance(points: &[Complex64], z: Complex64) -> f64 {
    let m = points.len();
    (0..m)
        .map(|k| segment_distance(points[k], points[(k + 1) % m], z))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disc_membership() {
        let d = Domain::unit_disc();
        assert!(d.contains(c(0.0, 0.0)));
        assert!(!d.contains(c(2.0, 0.0)));
        assert!(!d.contains(c(1.0, 0.0)));
    }

    #[test]
    fn disc_minus_two_discs_membership() {
        let d = Domain::disc_minus_two_discs();
        let z = c(0.5, 0.9);
        let analytic = z.norm() < 2.0 && (z - 1.0).norm() > 1.0 && (z + 1.0).norm() > 1.0;
        assert_eq!(d.contains(z), analytic);
        assert!(d.contains(z));
        assert!(!d.contains(c(0.5, 0.0)));
        assert!(!d.contains(c(0.0, 0.0)));
    }

    #[test]
    fn boundary_distances() {
        let d = Domain::unit_disc();
        assert!((d.boundary_distance(c(0.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((d.boundary_distance(c(3.0, 0.0)) - 2.0).abs() < 1e-15);
        let s = Domain::square(c(0.0, 0.0), 2.0).unwrap();
        assert!((s.boundary_distance(c(0.9, 0.9)) - 0.1).abs() < 1e-12);
        assert!((s.boundary_distance(c(2.0, 2.0)) - 2f64.sqrt()).abs() < 1e-12);
        assert!((s.boundary_distance(c(3.0, 0.5)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn drop_and_peach_membership() {
        let d = Domain::drop_shape();
        assert!(d.contains(c(0.5, 0.0)));
        assert!(d.contains(c(0.5, 0.2)));
        assert!(!d.contains(c(0.5, 0.3)));
        assert!(!d.contains(c(-0.1, 0.0)));
        let p = Domain::peach();
        assert!(p.contains(c(0.0, 0.0)));
        assert!(p.contains(c(0.0, 0.45)));
        assert!(!p.contains(c(0.0, 0.7)));
        assert!(p.contains(c(0.3, 0.9)));
    }

    #[test]
    fn row_intervals_agree_with_contains() {
        let shapes = vec![
            Domain::unit_disc(),
            Domain::square(c(0.2, -0.1), 1.3).unwrap(),
            Domain::drop_shape(),
            Domain::peach(),
            Domain::disc_minus_two_discs(),
            Domain::SmoothJordan(JordanCurve::ellipse(c(0.0, 0.0), 1.0, 0.5, 256).unwrap()),
        ];
        for d in shapes {
            for k in 0..41 {
                let y = -2.1 + 0.1025 * k as f64;
                let iv = d.row_intervals(y);
                for j in 0..97 {
                    let x = -2.13 + 0.0437 * j as f64;
                    let inside_iv = iv.iter().any(|&(a, b)| a < x && x < b);
                    assert_eq!(inside_iv, d.contains(c(x, y)), "{d:?} at ({x}, {y})");
                }
            }
        }
    }

    #[test]
    fn jordan_rejects_self_intersection_and_short_input() {
        let few: Vec<_> = (0..10).map(|k| Complex64::from_polar(1.0, k as f64)).collect();
        assert!(JordanCurve::new(few, None, 0.5).is_err());
        // figure eight
        let eight: Vec<_> = (0..128)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 128.0;
                c(t.sin(), (2.0 * t).sin() * 0.5)
            })
            .collect();
        assert!(JordanCurve::new(eight, None, 0.5).is_err());
    }

    #[test]
    fn jordan_is_reoriented_counterclockwise() {
        let cw: Vec<_> = (0..128)
            .map(|k| Complex64::from_polar(1.0, -std::f64::consts::TAU * k as f64 / 128.0))
            .collect();
        let curve = JordanCurve::new(cw, None, 1.0).unwrap();
        assert!(signed_area(curve.points()) > 0.0);
    }

    #[test]
    fn union_rejects_overlap() {
        let a = Domain::disc(c(-0.5, 0.0), 1.0).unwrap();
        let b = Domain::disc(c(0.5, 0.0), 1.0).unwrap();
        assert!(Domain::disjoint_union(vec![a.clone(), b]).is_err());
        let far = Domain::disc(c(3.0, 0.0), 1.0).unwrap();
        let u = Domain::disjoint_union(vec![a, far]).unwrap();
        assert!(u.contains(c(3.0, 0.0)));
        assert!((u.boundary_distance(c(1.5, 0.0)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn diameter_of_disc() {
        let d = Domain::unit_disc();
        assert!((d.diameter() - 2.0).abs() < 1e-9);
    }
}
