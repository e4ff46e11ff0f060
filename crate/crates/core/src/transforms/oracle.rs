//! Closed forms and independent quadratures for `B`.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::KernelDescriptor;
use crate::error::{QcError, Result};
use crate::geometry::Domain;

/// `B(χ_{D(a,r)})(z)`: `−r²/(z−a)²` outside the disc, 0 inside.
pub fn disc_oracle(a: Complex64, r: f64, z: Complex64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(QcError::InvalidArgument(format!(
            "disc radius must be positive, got {r}"
        )));
    }
    let d = z - a;
    if d.norm() < r {
        Ok(Complex64::new(0.0, 0.0))
    } else {
        Ok(-r * r / (d * d))
    }
}

/// The printed closed form `1/(z−1)² + 1/(z+1)²` for the disc minus two
/// discs, defined off the closed removed discs.
pub fn drop_example_oracle(z: Complex64) -> Result<Complex64> {
    if (z - 1.0).norm() <= 1.0 || (z + 1.0).norm() <= 1.0 {
        return Err(QcError::OutsideDomain(format!("{z} lies in a removed disc")));
    }
    let (a, b) = (z - 1.0, z + 1.0);
    Ok(1.0 / (a * a) + 1.0 / (b * b))
}

/// `B(χ_Ω)` for `Ω = D(0,2) \ (D̄(−1,1) ∪ D̄(1,1))` by superposing disc
/// oracles; valid on all of ℂ off the circles.
pub fn disc_minus_two_discs_exact(z: Complex64) -> Complex64 {
    let o = |a: f64, r: f64| disc_oracle(Complex64::new(a, 0.0), r, z).expect("positive radius");
    o(0.0, 2.0) - o(1.0, 1.0) - o(-1.0, 1.0)
}

/// Minimum sample count for [`boundary_beurling`].
pub const BOUNDARY_MIN_SAMPLES: usize = 256;

fn boundary_sum(dom: &Domain, z: Complex64, m: usize) -> Result<Complex64> {
    if let Domain::DisjointUnion(members) = dom {
        return members.iter().map(|d| boundary_sum(d, z, m)).sum::<Result<Complex64>>();
    }
    let pts = dom.boundary_parametrization(m)?;
    let spacing = pts.iter().map(|p| p.arc_weight).fold(0.0, f64::max);
    let closest = pts.iter().map(|p| (z - p.point).norm()).fold(f64::INFINITY, f64::min);
    if closest < spacing {
        return Err(QcError::InvalidArgument(format!(
            "{z} is within one arc spacing ({spacing:.3e}) of the boundary"
        )));
    }
    Ok(pts
        .iter()
        .map(|p| p.unit_tangent.conj() * p.arc_weight / (z - p.point))
        .sum::<Complex64>()
        / (2.0 * PI * Complex64::i()))
}

/// Constant matching the boundary integral to [`disc_oracle`] at `z = 3`
/// on the unit disc; computed once.
pub fn boundary_beurling_calibration() -> Complex64 {
    static CAL: OnceLock<Complex64> = OnceLock::new();
    *CAL.get_or_init(|| {
        let z = Complex64::new(3.0, 0.0);
        let raw = boundary_sum(&Domain::unit_disc(), z, 4096).expect("far point");
        disc_oracle(Complex64::new(0.0, 0.0), 1.0, z).expect("unit disc") / raw
    })
}

/// `B(χ_Ω)(z) = (1/2πi)∮ dw̄/(z−w)` by the trapezoid rule on `m` boundary
/// samples per component.
pub fn boundary_beurling(dom: &Domain, z: Complex64, m: usize) -> Result<Complex64> {
    if m < BOUNDARY_MIN_SAMPLES {
        return Err(QcError::InvalidArgument(format!(
            "boundary_beurling needs m >= {BOUNDARY_MIN_SAMPLES}, got {m}"
        )));
    }
    Ok(boundary_sum(dom, z, m)? * boundary_beurling_calibration())
}

fn lattice_sum<F>(f: &F, k: &KernelDescriptor, z: Complex64, radius: f64, hq: f64) -> Complex64
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let r = (radius / hq).ceil() as i64;
    let exclusion = 2.0 * hq;
    (-r..=r)
        .into_par_iter()
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in -r..=r {
                let w = Complex64::new(i as f64 * hq, j as f64 * hq);
                if w.norm() < exclusion {
                    continue;
                }
                acc += f(z - w) * k.eval(w);
            }
            acc * (hq * hq)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}

/// Principal value `∫ f(z−w) K(w) dA(w)` by the midpoint rule on a lattice
/// centered at `z` with a symmetric exclusion disc of radius `2·hq`, and one
/// Richardson step between `hq` and `hq/2`.
///
/// `radius` must bound `|z − y|` over the support of `f`.
pub fn pv_quadrature<F>(f: F, k: &KernelDescriptor, z: Complex64, radius: f64, hq: f64) -> Complex64
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let coarse = lattice_sum(&f, k, z, radius, hq);
    let fine = lattice_sum(&f, k, z, radius, hq / 2.0);
    (fine * 4.0 - coarse) / 3.0
}

/// One row of an oracle comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub z: Complex64,
    pub computed: Complex64,
    pub reference: Complex64,
    /// `|computed − reference| / |reference|`, absolute when the reference
    /// vanishes.
    pub rel_error: f64,
}

impl OracleRow {
    pub fn new(z: Complex64, computed: Complex64, reference: Complex64) -> Self {
        let err = (computed - reference).norm();
        let scale = reference.norm();
        Self {
            z,
            computed,
            reference,
            rel_error: if scale > 0.0 { err / scale } else { err },
        }
    }
}

pub fn write_oracle_csv(path: &Path, rows: &[OracleRow]) -> Result<()> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(w, "x,y,computed_re,computed_im,reference_re,reference_im,rel_error")?;
    for r in rows {
        writeln!(
            w,
            "{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            r.z.re, r.z.im, r.computed.re, r.computed.im, r.reference.re, r.reference.im, r.rel_error
        )?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disc_oracle_values() {
        assert_eq!(disc_oracle(c(0.0, 0.0), 1.0, c(2.0, 0.0)).unwrap(), c(-0.25, 0.0));
        assert_eq!(disc_oracle(c(0.0, 0.0), 1.0, c(0.5, 0.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(disc_oracle(c(1.0, 1.0), 2.0, c(5.0, 1.0)).unwrap(), c(-0.25, 0.0));
        assert_eq!(disc_oracle(c(1.0, 1.0), 2.0, c(1.0, 1.0)).unwrap(), c(0.0, 0.0));
        assert!(disc_oracle(c(0.0, 0.0), 0.0, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn drop_example_values() {
        let v = drop_example_oracle(c(0.0, 0.5)).unwrap();
        let want = 1.0 / (c(-1.0, 0.5) * c(-1.0, 0.5)) + 1.0 / (c(1.0, 0.5) * c(1.0, 0.5));
        assert!((v - want).norm() < 1e-15);
        // 2·Re(1/(1+0.5i)²) = 2·0.75/1.5625
        assert!((v - c(0.96, 0.0)).norm() < 1e-12);
        let far = drop_example_oracle(c(10.0, 0.0)).unwrap();
        assert!((far.re - (1.0 / 81.0 + 1.0 / 121.0)).abs() < 1e-15);
        let z = c(0.3, 1.4);
        // reflection in the imaginary axis conjugates the value
        assert!((drop_example_oracle(z).unwrap() - drop_example_oracle(-z.conj()).unwrap().conj()).norm() < 1e-15);
        assert!((drop_example_oracle(c(0.0, 1.3)).unwrap().im).abs() < 1e-15);
        assert!(drop_example_oracle(c(0.5, 0.0)).is_err());
    }

    #[test]
    fn exact_superposition_agrees_with_printed_formula_inside_outer_disc() {
        for z in [c(0.0, 1.5), c(0.4, -1.2), c(-0.1, 1.9)] {
            let a = disc_minus_two_discs_exact(z);
            let b = drop_example_oracle(z).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
        let z = c(3.0, 0.0);
        let gap = disc_minus_two_discs_exact(z) - drop_example_oracle(z).unwrap();
        assert!((gap + 4.0 / (z * z)).norm() < 1e-14);
    }

    #[test]
    fn boundary_integral_on_disc() {
        let d = Domain::unit_disc();
        let far = boundary_beurling(&d, c(2.0, 0.0), 256).unwrap();
        assert!((far - c(-0.25, 0.0)).norm() / 0.25 < 0.01);
        let inner = boundary_beurling(&d, c(0.3, 0.0), 256).unwrap();
        assert!(inner.norm() < 0.01);
        assert!((boundary_beurling_calibration() - c(1.0, 0.0)).norm() < 1e-9);
        assert!(boundary_beurling(&d, c(1.0, 0.0), 256).is_err());
        assert!(boundary_beurling(&d, c(2.0, 0.0), 64).is_err());
    }

    #[test]
    fn boundary_integral_on_square_matches_edge_closed_form() {
        // (1/2πi) Σ_sides τ̄² log((z−a)/(z−b)) for the edge from a to b
        let dom = Domain::square(c(0.0, 0.0), 2.0).unwrap();
        let corners = [c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0), c(-1.0, -1.0)];
        let z = c(0.3, 0.2);
        let mut want = c(0.0, 0.0);
        for k in 0..4 {
            let (a, b) = (corners[k], corners[(k + 1) % 4]);
            let tau = (b - a) / (b - a).norm();
            want += tau.conj() * tau.conj() * ((z - a) / (z - b)).ln();
        }
        want /= 2.0 * PI * Complex64::i();
        let got = boundary_beurling(&dom, z, 4096).unwrap();
        assert!((got - want).norm() < 1e-3, "{got} vs {want}");
        let center = boundary_beurling(&dom, c(0.0, 0.0), 1024).unwrap();
        assert!(center.norm() < 1e-12);
    }

    #[test]
    fn pv_quadrature_on_disc() {
        let chi = |w: Complex64| if w.norm() < 1.0 { c(1.0, 0.0) } else { c(0.0, 0.0) };
        let k = KernelDescriptor::Power(1);
        let far = pv_quadrature(chi, &k, c(2.0, 0.0), 3.1, 1.0 / 256.0);
        assert!((far - c(-0.25, 0.0)).norm() < 0.005, "{far}");
        let center = pv_quadrature(chi, &k, c(0.0, 0.0), 1.1, 1.0 / 256.0);
        assert!(center.norm() < 1e-12, "{center}");
    }

    #[test]
    fn oracle_csv_has_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("o.csv");
        let rows = [OracleRow::new(c(2.0, 0.0), c(-0.251, 0.0), c(-0.25, 0.0))];
        write_oracle_csv(&p, &rows).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!((rows[0].rel_error - 0.004).abs() < 1e-12);
    }
}
