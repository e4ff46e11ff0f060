//! Geodesic distance in the peach (unit disc minus a cusp notch at i/2):
//! a straddling pair must go below the cusp tip.

use num_complex::Complex64;
use qclab::geometry::geodesic_distance;
use qclab::{Domain, GridSpec};

fn main() -> qclab::Result<()> {
    let peach = Domain::peach();
    let (z, w) = (Complex64::new(-0.3, 0.9), Complex64::new(0.3, 0.9));
    let bound = 2.0 * (0.3f64.powi(2) + 0.4f64.powi(2)).sqrt();
    for n in [256, 512, 1024] {
        let grid = GridSpec::new(Complex64::new(0.0, 0.0), 2.0, n)?;
        let d = geodesic_distance(&peach, z, w, &grid)?;
        println!(
            "n = {n:>4}: d_Ω = {d:.4} (straight line {:.1}, lower bound {bound:.1})",
            (z - w).norm()
        );
    }
    let disc = Domain::unit_disc();
    let grid = GridSpec::new(Complex64::new(0.0, 0.0), 2.0, 512)?;
    println!("in the disc: {:.4}", geodesic_distance(&disc, z, w, &grid)?);
    Ok(())
}
