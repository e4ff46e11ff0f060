//! Cauchy transform of a smooth bump: ∂̄C(f) = f, ∂C(f) = B(f) and the
//! far field ∫f/(πz).

use num_complex::Complex64;
use qclab::transforms::{beurling, cauchy};
use qclab::{Field, GridSpec};

fn main() -> qclab::Result<()> {
    let grid = GridSpec::new(Complex64::new(0.0, 0.0), 4.0, 512)?;
    let f = Field::sample(grid, |z| {
        let r2 = z.norm_sqr();
        Complex64::new(if r2 < 1.0 { (1.0 - r2).powi(3) } else { 0.0 }, 0.0)
    })?;
    let c = cauchy(&f);
    let (d, dbar) = c.wirtinger_derivatives();

    println!("relative L2 of ∂̄C(f) − f: {:.3e}", dbar.relative_l2_error(&f)?);
    println!(
        "relative L2 of ∂C(f) − B(f): {:.3e}",
        d.relative_l2_error(&beurling(&f))?
    );

    let mass = f.integral();
    for x in [1.5, 2.0, 3.0] {
        let z = Complex64::new(x, 0.0);
        let far = mass / (std::f64::consts::PI * z);
        println!("C(f)({x}) = {:.6}, ∫f/(πz) = {far:.6}", c.interpolate(z).unwrap());
    }
    Ok(())
}
