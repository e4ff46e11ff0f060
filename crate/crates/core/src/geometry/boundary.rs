use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CuspModel, Domain, JordanCurve};
use crate::error::{QcError, Result};

/// A quadrature node on `∂Ω`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub point: Complex64,
    pub unit_tangent: Complex64,
    pub arc_weight: f64,
}

/// Smallest accepted sample count.
pub const MIN_BOUNDARY_SAMPLES: usize = 4;

impl Domain {
    /// Samples `∂Ω` with the interior on the left.
    ///
    /// The Disc-minus-two-discs model returns its three circles (outer one
    /// counterclockwise, inner ones clockwise); unions are rejected.
    pub fn boundary_parametrization(&self, m: usize) -> Result<Vec<BoundaryPoint>> {
        if m < MIN_BOUNDARY_SAMPLES {
            return Err(QcError::InvalidArgument(format!(
                "need at least {MIN_BOUNDARY_SAMPLES} boundary samples, got {m}"
            )));
        }
        Ok(match self {
            Domain::Disc { center, radius } => circle(*center, *radius, m, true),
            Domain::Square { center, side } => square(*center, *side, m),
            Domain::SmoothJordan(curve) => jordan(curve, m),
            Domain::Cuspidal(CuspModel::Drop) => drop_boundary(m),
            Domain::Cuspidal(CuspModel::Peach) => peach_boundary(m),
            Domain::Cuspidal(CuspModel::DiscMinusTwoDiscs) => {
                let inner = (m / 4).max(1);
                let outer = m - 2 * inner;
                let mut pts = circle(Complex64::new(0.0, 0.0), 2.0, outer, true);
                pts.extend(circle(Complex64::new(1.0, 0.0), 1.0, inner, false));
                pts.extend(circle(Complex64::new(-1.0, 0.0), 1.0, inner, false));
                pts
            }
            Domain::DisjointUnion(_) => {
                return Err(QcError::InvalidDomain(
                    "boundary_parametrization needs a single shape; parametrize union members separately".into(),
                ))
            }
        })
    }

    /// Sum of arc weights of a dense parametrization.
    pub fn perimeter(&self) -> f64 {
        match self {
            Domain::DisjointUnion(members) => members.iter().map(Domain::perimeter).sum(),
            _ => self
                .boundary_parametrization(4096)
                .map(|b| b.iter().map(|p| p.arc_weight).sum())
                .unwrap_or(0.0),
        }
    }
}

fn circle(center: Complex64, radius: f64, m: usize, ccw: bool) -> Vec<BoundaryPoint> {
    let sign = if ccw { 1.0 } else { -1.0 };
    (0..m)
        .map(|k| {
            let t = sign * TAU * k as f64 / m as f64;
            let u = Complex64::from_polar(1.0, t);
            BoundaryPoint {
                point: center + u * radius,
                unit_tangent: Complex64::i() * u * sign,
                arc_weight: TAU * radius / m as f64,
            }
        })
        .collect()
}

/// Midpoints of `m` equal arcs, starting at the lower-right corner and
/// running up the right side; corners are never sampled.
fn square(center: Complex64, side: f64, m: usize) -> Vec<BoundaryPoint> {
    let per = 4.0 * side;
    let h = side / 2.0;
    let corners = [
        Complex64::new(h, -h),
        Complex64::new(h, h),
        Complex64::new(-h, h),
        Complex64::new(-h, -h),
    ];
    let dirs = [
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(1.0, 0.0),
    ];
    (0..m)
        .map(|k| {
            let s = (k as f64 + 0.5) * per / m as f64;
            let edge = ((s / side) as usize).min(3);
            let t = s - edge as f64 * side;
            BoundaryPoint {
                point: center + corners[edge] + dirs[edge] * t,
                unit_tangent: dirs[edge],
                arc_weight: per / m as f64,
            }
        })
        .collect()
}

/// Resamples the polyline at `m` points equally spaced in arc length.
fn jordan(curve: &JordanCurve, m: usize) -> Vec<BoundaryPoint> {
    let pts = curve.points();
    let tans = curve.tangents();
    let k = pts.len();
    let mut cum = Vec::with_capacity(k + 1);
    cum.push(0.0);
    for i in 0..k {
        let len = (pts[(i + 1) % k] - pts[i]).norm();
        cum.push(cum[i] + len);
    }
    let total = cum[k];
    let mut seg = 0;
    (0..m)
        .map(|j| {
            let s = total * j as f64 / m as f64;
            while seg + 1 < k && cum[seg + 1] <= s {
                seg += 1;
            }
            let len = cum[seg + 1] - cum[seg];
            let t = if len > 0.0 { (s - cum[seg]) / len } else { 0.0 };
            let next = (seg + 1) % k;
            let tangent = tans[seg] * (1.0 - t) + tans[next] * t;
            let tangent = if tangent.norm() > 0.0 {
                tangent / tangent.norm()
            } else {
                let d = pts[next] - pts[seg];
                d / d.norm()
            };
            BoundaryPoint {
                point: pts[seg] + (pts[next] - pts[seg]) * t,
                unit_tangent: tangent,
                arc_weight: total / m as f64,
            }
        })
        .collect()
}

/// `x = sin²φ, y = −sin³φ·cosφ`, `φ ∈ [0, π)`: both arcs of
/// `y² = x³(1−x)`, starting at the cusp along the lower arc.
fn drop_boundary(m: usize) -> Vec<BoundaryPoint> {
    let dphi = PI / m as f64;
    (0..m)
        .map(|k| {
            let phi = k as f64 * dphi;
            let (s, c) = phi.sin_cos();
            // derivative divided by sin φ, finite at the cusp
            let d = Complex64::new(2.0 * c, -s * (3.0 * c * c - s * s));
            BoundaryPoint {
                point: Complex64::new(s * s, -s * s * s * c),
                unit_tangent: d / d.norm(),
                arc_weight: s * d.norm() * dphi,
            }
        })
        .collect()
}

/// Height above `i/2` at which the notch edge `|x| = t^{3/2}` meets the
/// unit circle.
fn peach_notch_height() -> f64 {
    let g = |t: f64| t.powi(3) + (0.5 + t) * (0.5 + t) - 1.0;
    let (mut lo, mut hi) = (0.0, 0.5);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Outer arc counterclockwise from the left notch corner to the right one,
/// down the right notch edge to the cusp and up the left edge.
fn peach_boundary(m: usize) -> Vec<BoundaryPoint> {
    let t_top = peach_notch_height();
    let corner = Complex64::new(t_top.powf(1.5), 0.5 + t_top);
    let theta_r = corner.arg();
    let theta_l = PI - theta_r;
    let arc_len = TAU - (theta_l - theta_r);
    // notch edge length by fine midpoint rule
    let edge_len = {
        let steps = 4096;
        let dt = t_top / steps as f64;
        (0..steps)
            .map(|k| {
                let t = (k as f64 + 0.5) * dt;
                (1.0 + 2.25 * t).sqrt() * dt
            })
            .sum::<f64>()
    };
    let total = arc_len + 2.0 * edge_len;
    let m_edge = ((m as f64 * edge_len / total).round() as usize).max(1);
    let m_arc = m.saturating_sub(2 * m_edge).max(1);

    let mut out = Vec::with_capacity(m_arc + 2 * m_edge);
    let dtheta = arc_len / m_arc as f64;
    for k in 0..m_arc {
        let th = theta_l + (k as f64 + 0.5) * dtheta;
        let u = Complex64::from_polar(1.0, th);
        out.push(BoundaryPoint {
            point: u,
            unit_tangent: Complex64::i() * u,
            arc_weight: dtheta,
        });
    }
    // edges in the parameter s = √t, which clusters samples at the cusp
    let s_top = t_top.sqrt();
    let ds = s_top / m_edge as f64;
    let edge = |s: f64, sign: f64| {
        let t = s * s;
        let point = Complex64::new(sign * t.powf(1.5), 0.5 + t);
        // d/dt of (±t^{3/2}, t), pointing up
        let d = Complex64::new(sign * 1.5 * t.sqrt(), 1.0);
        (point, d, 2.0 * s)
    };
    for k in 0..m_edge {
        let s = s_top - (k as f64 + 0.5) * ds;
        let (point, d, dtds) = edge(s, 1.0);
        out.push(BoundaryPoint {
            point,
            unit_tangent: -d / d.norm(),
            arc_weight: d.norm() * dtds * ds,
        });
    }
    for k in 0..m_edge {
        let s = (k as f64 + 0.5) * ds;
        let (point, d, dtds) = edge(s, -1.0);
        out.push(BoundaryPoint {
            point,
            unit_tangent: d / d.norm(),
            arc_weight: d.norm() * dtds * ds,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn disc_four_points() {
        let b = Domain::unit_disc().boundary_parametrization(4).unwrap();
        let want = [
            (c(1.0, 0.0), c(0.0, 1.0)),
            (c(0.0, 1.0), c(-1.0, 0.0)),
            (c(-1.0, 0.0), c(0.0, -1.0)),
            (c(0.0, -1.0), c(1.0, 0.0)),
        ];
        for (p, (z, t)) in b.iter().zip(want) {
            assert!(close(p.point, z) && close(p.unit_tangent, t), "{p:?}");
        }
    }

    #[test]
    fn square_perimeter_and_corners() {
        let b = Domain::square(c(0.0, 0.0), 2.0)
            .unwrap()
            .boundary_parametrization(8)
            .unwrap();
        let total: f64 = b.iter().map(|p| p.arc_weight).sum();
        assert!((total - 8.0).abs() < 0.04);
        assert!(b.iter().all(|p| p.point.re.abs() == 1.0 || p.point.im.abs() == 1.0));
        assert!(b.iter().all(|p| !(p.point.re.abs() == 1.0 && p.point.im.abs() == 1.0)));
    }

    #[test]
    fn weights_sum_to_perimeter() {
        let cases = [
            (Domain::disc(c(0.3, 0.0), 0.7).unwrap(), TAU * 0.7),
            (Domain::square(c(0.0, 0.0), 1.5).unwrap(), 6.0),
            (Domain::disc_minus_two_discs(), 8.0 * PI),
        ];
        for (d, per) in cases {
            let total: f64 = d
                .boundary_parametrization(256)
                .unwrap()
                .iter()
                .map(|p| p.arc_weight)
                .sum();
            assert!((total - per).abs() / per < 0.005, "{d:?}: {total}");
        }
    }

    #[test]
    fn tangents_are_unit_and_traverse_positively() {
        for d in [Domain::drop_shape(), Domain::peach(), Domain::unit_disc()] {
            let b = d.boundary_parametrization(512).unwrap();
            assert!(b.iter().all(|p| (p.unit_tangent.norm() - 1.0).abs() < 1e-9));
            // a point slightly to the left of the tangent is inside
            let mut inside = 0;
            for p in &b {
                let probe = p.point + Complex64::i() * p.unit_tangent * 1e-4;
                if d.contains(probe) {
                    inside += 1;
                }
            }
            assert!(inside as f64 > 0.95 * b.len() as f64, "{d:?}: {inside}/{}", b.len());
        }
    }

    #[test]
    fn drop_arcs_meet_at_cusp_with_equal_tangent_lines() {
        let b = Domain::drop_shape().boundary_parametrization(256).unwrap();
        assert!(close(b[0].point, c(0.0, 0.0)));
        let after = b[1].unit_tangent;
        let before = b[255].unit_tangent;
        // directions are opposite, tangent lines coincide, τ² continuous
        assert!((after * before.conj()).re < -0.99);
        assert!((after * after - before * before).norm() < 0.1);
        assert!(b[255].point.norm() < 1e-3 && b[1].point.norm() < 1e-3);
    }

    #[test]
    fn peach_tangent_square_is_continuous_at_cusp() {
        let b = Domain::peach().boundary_parametrization(4096).unwrap();
        let near: Vec<_> = b.iter().filter(|p| (p.point - c(0.0, 0.5)).norm() < 0.005).collect();
        assert!(near.len() >= 2);
        for p in &near {
            let t2 = p.unit_tangent * p.unit_tangent;
            assert!((t2 - c(-1.0, 0.0)).norm() < 0.25, "{p:?}");
        }
    }

    #[test]
    fn union_is_rejected() {
        let u = Domain::DisjointUnion(vec![Domain::unit_disc()]);
        assert!(u.boundary_parametrization(64).is_err());
    }
}
