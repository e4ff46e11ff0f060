//! B(χ_D) for the unit disc against the closed form −1/z² and the
//! boundary integral, at a few exterior points.

use num_complex::Complex64;
use qclab::geometry::Rasterization;
use qclab::transforms::{beurling, boundary_beurling, disc_oracle};
use qclab::{Domain, GridSpec};

fn main() -> qclab::Result<()> {
    // half-width 8 keeps the periodization error near 0.2% at |z| = 2
    let grid = GridSpec::new(Complex64::new(0.0, 0.0), 8.0, 1024)?;
    let disc = Domain::unit_disc();
    let b = beurling(&disc.indicator(&grid, Rasterization::default()));

    println!("{:>18} {:>24} {:>24} {:>10}", "z", "fft", "exact", "rel err");
    for z in [
        Complex64::new(1.2, 0.0),
        Complex64::new(0.0, 1.5),
        Complex64::new(-1.1, 0.8),
        Complex64::new(2.0, 0.0),
    ] {
        let exact = disc_oracle(Complex64::new(0.0, 0.0), 1.0, z)?;
        let fft = b.interpolate(z).expect("inside the grid");
        println!(
            "{z:>18.3} {fft:>24.6} {exact:>24.6} {:>10.2e}",
            (fft - exact).norm() / exact.norm()
        );
    }

    let z = Complex64::new(0.0, 1.5);
    println!("boundary integral at {z}: {:.8}", boundary_beurling(&disc, z, 1024)?);
    println!(
        "at the center: {:.3e} (zero for a disc)",
        b.interpolate(Complex64::new(0.0, 0.0)).unwrap().norm()
    );
    Ok(())
}
