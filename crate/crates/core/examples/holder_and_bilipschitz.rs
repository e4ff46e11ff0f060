//! μ = 0.9χ on a disc and on a square: bilipschitz ratios under refinement
//! and the measured Hölder exponent against the Mori bound.

use num_complex::Complex64;
use qclab::beltrami::{mori_exponent, neumann_solve, BeltramiCoefficient, MapEvaluator};
use qclab::regularity::{bilipschitz_constants, measured_holder_exponent, DEFAULT_SEED};
use qclab::{Domain, GridSpec};

fn main() -> qclab::Result<()> {
    let shapes = [
        ("disc", Domain::unit_disc()),
        ("square", Domain::square(Complex64::new(0.0, 0.0), 2.0)?),
    ];
    for (name, dom) in shapes {
        for n in [128, 256, 512] {
            let grid = GridSpec::new(Complex64::new(0.0, 0.0), 4.0, n)?;
            let mu = BeltramiCoefficient::constant(dom.clone(), Complex64::new(0.9, 0.0))?;
            let map = MapEvaluator::new(neumann_solve(&mu, &grid, 1e-8, 400)?);
            let r = bilipschitz_constants(&map, &dom, 20_000, 4.0 * grid.spacing(), DEFAULT_SEED)?;
            let a = measured_holder_exponent(&map, &dom, 20_000, DEFAULT_SEED)?;
            println!(
                "{name:>6} n = {n:>4}: lower {:.4}, upper {:.4}, exponent {a:.3}",
                r.lower, r.upper
            );
        }
    }
    println!("Mori bound (1−k)/(1+k) at k = 0.9: {:.4}", mori_exponent(0.9)?);
    Ok(())
}
