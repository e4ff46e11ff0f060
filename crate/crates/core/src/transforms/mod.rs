//! Beurling and Cauchy transforms, powers of `B`, truncated and maximal
//! operators, commutators and the closed-form oracles used to check them.

mod kernel;
mod oracle;
mod truncated;

pub use kernel::{
    cz_constant, loglog_slope, power_cz_constant_exact, AngularTable, CZConstant, KernelDescriptor, CZ_CIRCLE_SAMPLES,
    CZ_DIFF_STEP, TABLE_TOLERANCE,
};
pub use oracle::{
    boundary_beurling, boundary_beurling_calibration, disc_minus_two_discs_exact, disc_oracle, drop_example_oracle,
    pv_quadrature, write_oracle_csv, OracleRow,
};
pub use truncated::{maximal, truncated, TruncationProfile};

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{QcError, Result};
use crate::field::{apply_multiplier, Field, FrequencyMultiplier, GridSpec};
use crate::geometry::{Domain, Rasterization};

/// Inputs must vanish outside `center ± SUPPORT_FRACTION·half_width`.
pub const SUPPORT_FRACTION: f64 = 0.5;

fn warn_if_wide(f: &Field, op: &str) {
    if !f.supported_in_central(SUPPORT_FRACTION) {
        log::warn!("{op}: input is not supported in the central quarter of its box; expect wrap-around error");
    }
}

/// Multiplier table of `B`, cached per grid size.
fn beurling_table(f: &Field) -> Arc<Vec<Complex64>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<Complex64>>>>> = OnceLock::new();
    let n = f.grid().n();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("beurling table cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(FrequencyMultiplier::beurling_power(1).table(f.grid())))
        .clone()
}

/// `B f`: multiplier `ξ̄/ξ`, zero frequency 0.
pub fn beurling(f: &Field) -> Field {
    warn_if_wide(f, "beurling");
    crate::field::apply_table(f, &beurling_table(f))
}

/// `c_n` in the constant `c_n/L²` by which the periodic kernel of `Bⁿ`
/// on a box of side `L` exceeds `bₙ` near the origin. `Bⁿψ` vanishes at the
/// center of a radial ψ, so the periodic transform of a narrow unit-mass
/// Gaussian on the unit box reads `c_n` there. Zero up to rounding for odd
/// `n` (the lattice is invariant under quarter turns).
fn periodization_constant(n: u32) -> Complex64 {
    static CACHE: OnceLock<Mutex<HashMap<u32, Complex64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("periodization cache poisoned");
    *guard.entry(n).or_insert_with(|| {
        let m = 256;
        let grid = GridSpec::new(Complex64::new(0.0, 0.0), 0.5, m).expect("valid grid");
        let s2 = 2.0 * 0.02f64.powi(2);
        let psi = Field::sample(grid, |z| Complex64::new((-z.norm_sqr() / s2).exp(), 0.0)).expect("finite");
        let psi = psi.scale(1.0 / psi.integral());
        apply_multiplier(&psi, &FrequencyMultiplier::beurling_power(n)).get(m / 2, m / 2)
    })
}

/// Applies `k` by its multiplier; powers of `B` also drop the constant
/// periodization term `c_n/L²·∫f`.
pub fn apply_kernel(f: &Field, k: &KernelDescriptor) -> Field {
    let periodic = apply_multiplier(f, &k.multiplier(f.grid()));
    match k {
        KernelDescriptor::Power(n) if n % 2 == 0 => {
            let shift = periodization_constant(*n) / f.grid().side().powi(2) * f.integral();
            periodic.map(|v| v - shift).expect("finite shift")
        }
        _ => periodic,
    }
}

/// `Bⁿ f` by the multiplier `(ξ̄/ξ)ⁿ`, less the periodization constant for
/// even `n`.
pub fn beurling_power(f: &Field, n: u32) -> Result<Field> {
    if n == 0 {
        return Err(QcError::InvalidArgument("beurling_power needs n >= 1".into()));
    }
    if n == 1 {
        return Ok(beurling(f));
    }
    warn_if_wide(f, "beurling_power");
    Ok(apply_kernel(f, &KernelDescriptor::Power(n)))
}

/// `C f(z) = (1/π)∫ f(w)/(z−w) dA(w)`.
///
/// The periodic multiplier `L/(πiξ)` loses the zero mode; the term
/// `(1/A)∫ f(w)(z̄−w̄) dA(w)` restores it, so that `∂̄Cf = f` and `Cf`
/// decays like `(∫f)/(πz)`.
pub fn cauchy(f: &Field) -> Field {
    warn_if_wide(f, "cauchy");
    let grid = *f.grid();
    let periodic = apply_multiplier(f, &FrequencyMultiplier::cauchy(grid.side()));
    let da = grid.cell_area();
    let (m0, m1) = f.values().iter().enumerate().fold(
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        |(m0, m1), (i, v)| (m0 + v * da, m1 + v * grid.node_at(i).conj() * da),
    );
    let area = grid.side() * grid.side();
    let vals = periodic
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v + (m0 * grid.node_at(i).conj() - m1) / area)
        .collect();
    Field::from_parts(grid, vals)
}

/// `T_Ω g = χ_Ω·T(χ_Ω g)`, the operator restricted to Ω.
pub fn restricted(g: &Field, dom: &Domain, k: &KernelDescriptor, raster: Rasterization) -> Result<Field> {
    let chi = dom.indicator(g.grid(), raster);
    let inner = apply_kernel(&g.mul(&chi)?, k);
    inner.mul(&chi)
}

/// `[T,a]f(x) = ∫_Ω (a(x)−a(y)) K(x−y) f(y) dy`, computed as
/// `a·T(χ_Ω f) − T(χ_Ω a f)` and reported at nodes inside Ω (zero elsewhere).
pub fn commutator(a: &Field, f: &Field, dom: &Domain, k: &KernelDescriptor) -> Result<Field> {
    a.check_same_grid(f)?;
    let grid = *f.grid();
    let chi = dom.indicator(&grid, Rasterization::default());
    let fchi = f.mul(&chi)?;
    let t_f = apply_kernel(&fchi, k);
    let t_af = apply_kernel(&a.mul(&fchi)?, k);
    let inside = dom.point_mask(&grid);
    let vals = a
        .values()
        .iter()
        .zip(t_f.values())
        .zip(t_af.values())
        .zip(&inside)
        .map(|(((a, tf), taf), ins)| if *ins { a * tf - taf } else { Complex64::new(0.0, 0.0) })
        .collect();
    Field::new(grid, vals)
}
