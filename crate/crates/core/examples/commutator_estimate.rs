//! ‖[B,a]f‖_α ≤ C·σ_α(a)·‖f‖_β for a = Re z, f = χ_D, α = β = 1/2: the
//! fitted C under refinement.

use num_complex::Complex64;
use qclab::geometry::Rasterization;
use qclab::regularity::{commutator_constant, DEFAULT_SEED};
use qclab::{Domain, Field, GridSpec};

fn main() -> qclab::Result<()> {
    let disc = Domain::unit_disc();
    for n in [256, 512, 1024] {
        let grid = GridSpec::new(Complex64::new(0.0, 0.0), 4.0, n)?;
        let a = Field::sample(grid, |z| Complex64::new(z.re, 0.0))?;
        let f = disc.indicator(&grid, Rasterization::default());
        let e = commutator_constant(&a, &f, &disc, 0.5, 0.5, 20_000, DEFAULT_SEED)?;
        println!(
            "n = {n:>4}: ‖[B,a]f‖ = {:.4}, σ(a) = {:.4}, ‖f‖ = {:.4}, C = {:.4}",
            e.commutator_norm, e.sigma_a, e.f_norm, e.constant
        );
    }
    Ok(())
}
