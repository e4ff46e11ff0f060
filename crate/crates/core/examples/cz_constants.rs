//! Calderón-Zygmund constants of the powers bₙ(z) = (−1)ⁿ n z̄ⁿ⁻¹/(π zⁿ⁺¹)
//! and the truncated operators of a disc indicator.

use num_complex::Complex64;
use qclab::geometry::Rasterization;
use qclab::transforms::{cz_constant, loglog_slope, maximal, power_cz_constant_exact, truncated, KernelDescriptor};
use qclab::{Domain, GridSpec};

fn main() -> qclab::Result<()> {
    let (mut ns, mut cs) = (Vec::new(), Vec::new());
    for n in 1..=12u32 {
        let c = cz_constant(&KernelDescriptor::power(n)?);
        println!(
            "n = {n:>2}: ‖bₙ‖_CZ = {:>9.4} (closed form {:>9.4})",
            c.value,
            power_cz_constant_exact(n)
        );
        ns.push(n as f64);
        cs.push(c.value);
    }
    println!("growth exponent {:.3}", loglog_slope(&ns, &cs));

    let grid = GridSpec::new(Complex64::new(0.0, 0.0), 4.0, 256)?;
    let chi = Domain::unit_disc().indicator(&grid, Rasterization::default());
    let k = KernelDescriptor::power(1)?;
    let z = Complex64::new(1.1, 0.0);
    for delta in [0.05, 0.2, 0.4] {
        println!("T^δ χ_D({z}) at δ = {delta}: {:.5}", truncated(&chi, &k, delta, z)?);
    }
    println!("maximal over δ: {:.5}", maximal(&chi, &k, z, &[0.05, 0.1, 0.2, 0.4])?);
    Ok(())
}
