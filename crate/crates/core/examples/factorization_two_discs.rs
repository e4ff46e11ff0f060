//! Two discs with λ = 0.3: the map built from single-part solves composed
//! through their images against the direct solve.

use std::time::Instant;

use num_complex::Complex64;
use qclab::beltrami::{factor_solve, neumann_solve, BeltramiCoefficient, BeltramiPart, Coefficient, MapEvaluator};
use qclab::{Domain, GridSpec};

fn main() -> qclab::Result<()> {
    let grid = GridSpec::new(Complex64::new(0.0, 0.0), 8.0, 1024)?;
    let parts = [-2.0, 2.0]
        .into_iter()
        .map(|x| {
            Ok(BeltramiPart {
                domain: Domain::disc(Complex64::new(x, 0.0), 0.5)?,
                coefficient: Coefficient::Constant(Complex64::new(0.3, 0.0)),
            })
        })
        .collect::<qclab::Result<Vec<_>>>()?;
    let mu = BeltramiCoefficient::new(parts)?;

    let t = Instant::now();
    let direct = MapEvaluator::new(neumann_solve(&mu, &grid, 1e-8, 200)?);
    println!("direct solve: {:.2?}", t.elapsed());
    let t = Instant::now();
    let factored = factor_solve(&mu, &grid, 1e-8)?;
    println!(
        "factored solve ({} stages): {:.2?}",
        factored.stages().len(),
        t.elapsed()
    );

    for z in [
        Complex64::new(-2.0, 0.2),
        Complex64::new(0.0, 0.0),
        Complex64::new(2.3, -0.1),
        Complex64::new(1.0, 2.0),
    ] {
        let (a, b) = (direct.evaluate(z)?, factored.evaluate(z)?);
        println!(
            "z = {z:.2}: direct {a:.6}, factored {b:.6}, |diff| {:.2e}",
            (a - b).norm()
        );
    }
    Ok(())
}
