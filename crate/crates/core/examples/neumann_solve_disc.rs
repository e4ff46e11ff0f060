//! μ = λχ_D: the Neumann series gives h = λχ_D and Φ(z) = z + λz̄ inside,
//! z + λ/z outside. Also shows inversion and the Jacobian scan.

use num_complex::Complex64;
use qclab::beltrami::{jacobian_scan, neumann_solve, BeltramiCoefficient, MapEvaluator, DEFAULT_TOL};
use qclab::{Domain, GridSpec};

fn main() -> qclab::Result<()> {
    let lambda = 0.5;
    let grid = GridSpec::new(Complex64::new(0.0, 0.0), 4.0, 1024)?;
    let disc = Domain::unit_disc();
    let mu = BeltramiCoefficient::constant(disc.clone(), Complex64::new(lambda, 0.0))?;
    let sol = neumann_solve(&mu, &grid, DEFAULT_TOL, 200)?;
    println!(
        "terms {}, residual {:.2e}, last term norms {:?}",
        sol.terms_used,
        sol.residual,
        &sol.term_norms[sol.term_norms.len().saturating_sub(3)..]
    );

    let map = MapEvaluator::new(sol.clone());
    for z in [
        Complex64::new(0.3, 0.2),
        Complex64::new(0.0, -0.7),
        Complex64::new(1.5, 0.5),
    ] {
        let exact = if z.norm() < 1.0 {
            z + lambda * z.conj()
        } else {
            z + lambda / z
        };
        let w = map.evaluate(z)?;
        let back = map.invert(w, 1e-10)?;
        println!("Φ({z:.2}) = {w:.5} (exact {exact:.5}), Φ⁻¹ returns {back:.6}");
    }

    // ∂Φ jumps across ∂D, so scan inside the support only
    let scan = jacobian_scan(&sol, &disc, 4.0 * grid.spacing())?;
    println!(
        "min Jacobian {:.4} (exact 1 − λ² = {:.4}), min |∂Φ| {:.4}",
        scan.min_jacobian,
        1.0 - lambda * lambda,
        scan.min_dphi
    );
    Ok(())
}
