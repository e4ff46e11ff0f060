//! The disc of radius 2 minus two unit discs, with cusps at 0: Hölder
//! seminorm traces of the printed closed form and the jump of B(χ_Ω)
//! across the cusp.

use num_complex::Complex64;
use qclab::geometry::Rasterization;
use qclab::regularity::{holder_seminorm, DistanceMode, DEFAULT_SEED};
use qclab::transforms::{beurling, disc_minus_two_discs_exact, drop_example_oracle};
use qclab::{Domain, Field, GridSpec};

fn main() -> qclab::Result<()> {
    let dom = Domain::disc_minus_two_discs();
    for n in [128, 256, 512, 1024] {
        let grid = GridSpec::new(Complex64::new(0.0, 0.0), 4.0, n)?;
        let f = Field::sample(grid, |z| drop_example_oracle(z).unwrap_or_default())?;
        let e = holder_seminorm(&f, &dom, 0.75, 200_000, DistanceMode::Euclidean, DEFAULT_SEED)?;
        println!("n = {n:>4}: σ_0.75 = {:.4}", e.value);
    }

    let grid = GridSpec::new(Complex64::new(0.0, 0.0), 4.0, 1024)?;
    let b = beurling(&dom.indicator(&grid, Rasterization::default()));
    println!("{:>6} {:>12} {:>12}", "y", "|ΔB| fft", "|ΔB| exact");
    for y in [0.3, 0.4, 0.5, 0.6] {
        let (z1, z2) = (Complex64::new(-y * y, y), Complex64::new(y * y, y));
        let fft = (b.interpolate(z1).unwrap() - b.interpolate(z2).unwrap()).norm();
        let exact = (disc_minus_two_discs_exact(z1) - disc_minus_two_discs_exact(z2)).norm();
        println!("{y:>6.2} {fft:>12.5} {exact:>12.5}");
    }
    Ok(())
}
