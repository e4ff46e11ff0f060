//! Beltrami equation `∂̄Φ = μ∂Φ` by the Neumann series
//! `h = Σ (μB)ⁿ μ`, `Φ = z + C(h)`.

mod factor;
mod io;
mod map;

pub use factor::factor_solve;
pub use io::{
    read_solution_archive, write_solution_archive, CoefficientSpec, GridConfig, PartSpec, ProblemSpec, SolutionArchive,
    SolutionDiagnostics,
};
pub use map::{
    evaluate_map, invert_map, jacobian_scan, JacobianScan, MapEvaluator, MapStage, NEWTON_MAX_ITERATIONS,
    RELIABLE_FRACTION,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QcError, Result};
use crate::field::{Field, GridSpec};
use crate::geometry::{Domain, Rasterization};
use crate::transforms::{beurling, cauchy, SUPPORT_FRACTION};

/// Default stopping tolerance on `‖term‖₂ / ‖μ‖₂`.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Default cap on the number of Neumann terms.
pub const DEFAULT_MAX_TERMS: usize = 200;

/// Values of μ on one domain.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Constant(Complex64),
    /// Samples on some grid; read by bilinear interpolation.
    Field(Field),
}

impl Coefficient {
    pub fn at(&self, z: Complex64) -> Complex64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Field(f) => f.interpolate(z).unwrap_or_default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BeltramiPart {
    pub domain: Domain,
    pub coefficient: Coefficient,
}

/// `μ = Σ μⱼ χ_{Ωⱼ}` with `‖μ‖∞ = k < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BeltramiCoefficient {
    parts: Vec<BeltramiPart>,
    k: f64,
    raster: Rasterization,
}

impl BeltramiCoefficient {
    pub fn new(parts: Vec<BeltramiPart>) -> Result<Self> {
        let mut k: f64 = 0.0;
        for p in &parts {
            let sup = match &p.coefficient {
                Coefficient::Constant(c) => c.norm(),
                Coefficient::Field(f) => {
                    let inside = p.domain.point_mask(f.grid());
                    f.values()
                        .iter()
                        .zip(&inside)
                        .filter(|(_, m)| **m)
                        .map(|(v, _)| v.norm())
                        .fold(0.0, f64::max)
                }
            };
            if !sup.is_finite() {
                return Err(QcError::InvalidArgument("coefficient is not finite".into()));
            }
            k = k.max(sup);
        }
        if k >= 1.0 {
            return Err(QcError::NotContractive(k));
        }
        if parts.len() > 1 {
            Domain::disjoint_union(parts.iter().map(|p| p.domain.clone()).collect())?;
        }
        Ok(Self {
            parts,
            k,
            raster: Rasterization::default(),
        })
    }

    /// `λ·χ_Ω`.
    pub fn constant(domain: Domain, lambda: Complex64) -> Result<Self> {
        Self::new(vec![BeltramiPart {
            domain,
            coefficient: Coefficient::Constant(lambda),
        }])
    }

    pub fn zero() -> Self {
        Self {
            parts: Vec::new(),
            k: 0.0,
            raster: Rasterization::default(),
        }
    }

    pub fn with_rasterization(mut self, raster: Rasterization) -> Self {
        self.raster = raster;
        self
    }

    pub fn parts(&self) -> &[BeltramiPart] {
        &self.parts
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn rasterization(&self) -> Rasterization {
        self.raster
    }

    /// Union of the part domains, or `None` for μ = 0.
    pub fn support(&self) -> Option<Domain> {
        match self.parts.len() {
            0 => None,
            1 => Some(self.parts[0].domain.clone()),
            _ => Some(Domain::DisjointUnion(
                self.parts.iter().map(|p| p.domain.clone()).collect(),
            )),
        }
    }

    /// μ sampled on `grid`.
    pub fn rasterize(&self, grid: &GridSpec) -> Field {
        let mut vals = vec![Complex64::new(0.0, 0.0); grid.len()];
        for p in &self.parts {
            let chi = p.domain.indicator(grid, self.raster);
            for (i, (v, w)) in vals.iter_mut().zip(chi.values()).enumerate() {
                if w.re > 0.0 {
                    *v += p.coefficient.at(grid.node_at(i)) * w.re;
                }
            }
        }
        Field::new(*grid, vals).expect("finite coefficient")
    }

    /// Fails unless every part lies in the central quarter of `grid`.
    pub fn check_support(&self, grid: &GridSpec) -> Result<()> {
        let lim = SUPPORT_FRACTION * grid.half_width();
        for p in &self.parts {
            let r = p.domain.support_radius_about(grid.center());
            if r > lim {
                return Err(QcError::InvalidArgument(format!(
                    "domain extends {r:.3} from the grid center; the central quarter allows {lim:.3}"
                )));
            }
        }
        Ok(())
    }
}

/// Neumann-series solution of `(I − μB)h = μ`.
#[derive(Clone, Debug)]
pub struct Solution {
    pub coefficient: BeltramiCoefficient,
    /// μ as sampled on the grid.
    pub mu: Field,
    pub h: Field,
    pub terms_used: usize,
    /// `‖(μB)ⁿμ‖₂` for each summed term.
    pub term_norms: Vec<f64>,
    pub residual: f64,
    pub tol: f64,
}

impl Solution {
    pub fn grid(&self) -> &GridSpec {
        self.h.grid()
    }

    pub fn k(&self) -> f64 {
        self.coefficient.k()
    }
}

/// Solves for `h` with the coefficient sampled on `grid`.
pub fn neumann_solve(mu: &BeltramiCoefficient, grid: &GridSpec, tol: f64, max_terms: usize) -> Result<Solution> {
    mu.check_support(grid)?;
    let field = mu.rasterize(grid);
    neumann_solve_field(mu.clone(), field, tol, max_terms)
}

/// Solves for `h` from an already sampled μ; `coefficient` is carried
/// along for reporting.
pub fn neumann_solve_field(
    coefficient: BeltramiCoefficient,
    mu: Field,
    tol: f64,
    max_terms: usize,
) -> Result<Solution> {
    let k = mu.sup_norm();
    if k >= 1.0 {
        return Err(QcError::NotContractive(k));
    }
    if !(tol > 0.0) || max_terms == 0 {
        return Err(QcError::InvalidArgument(
            "tol must be positive and max_terms >= 1".into(),
        ));
    }
    let mu_norm = mu.l2_norm();
    if mu_norm == 0.0 {
        return Ok(Solution {
            coefficient,
            h: Field::zeros(*mu.grid()),
            mu,
            terms_used: 1,
            term_norms: vec![0.0],
            residual: 0.0,
            tol,
        });
    }
    let mut h = mu.clone();
    let mut term = mu.clone();
    let mut term_norms = vec![mu_norm];
    while term_norms.last().copied().unwrap_or(0.0) > tol * mu_norm {
        if term_norms.len() >= max_terms {
            let n = term_norms.len();
            let last_ratio = if n >= 2 {
                term_norms[n - 1] / term_norms[n - 2].max(f64::MIN_POSITIVE)
            } else {
                f64::NAN
            };
            return Err(QcError::NonConvergence {
                terms: n,
                last_ratio,
                term_norms,
            });
        }
        term = mu.mul(&beurling(&term))?;
        term_norms.push(term.l2_norm());
        h = h.add(&term)?;
    }
    let res = residual_field(&mu, &h)?;
    Ok(Solution {
        coefficient,
        mu,
        h,
        terms_used: term_norms.len(),
        term_norms,
        residual: res,
        tol,
    })
}

fn residual_field(mu: &Field, h: &Field) -> Result<f64> {
    mu.check_same_grid(h)?;
    let mu_norm = mu.l2_norm();
    let r = h.sub(&mu.mul(&beurling(h))?)?.sub(mu)?;
    if mu_norm == 0.0 {
        if h.sup_norm() == 0.0 {
            return Ok(0.0);
        }
        return Err(QcError::InvalidArgument("residual undefined: μ = 0 but h ≠ 0".into()));
    }
    Ok(r.l2_norm() / mu_norm)
}

/// `‖(I − μB)h − μ‖₂ / ‖μ‖₂` with μ sampled on the grid of `h`.
pub fn residual(mu: &BeltramiCoefficient, h: &Field) -> Result<f64> {
    residual_field(&mu.rasterize(h.grid()), h)
}

/// `(∂Φ, ∂̄Φ) = (1 + B h, h)`.
pub fn map_partials(sol: &Solution) -> (Field, Field) {
    let d = beurling(&sol.h).map(|v| v + 1.0).expect("finite");
    (d, sol.h.clone())
}

/// `C(h)`, the correction `Φ(z) − z`.
pub fn map_correction(sol: &Solution) -> Field {
    cauchy(&sol.h)
}

/// Mori exponent `(1−k)/(1+k)`.
pub fn mori_exponent(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(QcError::InvalidArgument(format!("k must lie in [0, 1), got {k}")));
    }
    Ok((1.0 - k) / (1.0 + k))
}

/// Parameters shared by the solvers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(c(0.0, 0.0), 4.0, n).unwrap()
    }

    #[test]
    fn zero_coefficient_gives_identity() {
        let g = grid(64);
        let sol = neumann_solve(&BeltramiCoefficient::zero(), &g, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
        assert_eq!(sol.terms_used, 1);
        assert_eq!(sol.h.sup_norm(), 0.0);
        let (d, dbar) = map_partials(&sol);
        assert!(d.values().iter().all(|v| *v == c(1.0, 0.0)));
        assert_eq!(dbar.sup_norm(), 0.0);
    }

    #[test]
    fn rejects_k_at_least_one_and_wide_support() {
        assert!(matches!(
            BeltramiCoefficient::constant(Domain::unit_disc(), c(1.0, 0.0)),
            Err(QcError::NotContractive(_))
        ));
        let wide = BeltramiCoefficient::constant(Domain::disc(c(0.0, 0.0), 3.0).unwrap(), c(0.5, 0.0)).unwrap();
        assert!(neumann_solve(&wide, &grid(64), DEFAULT_TOL, DEFAULT_MAX_TERMS).is_err());
    }

    #[test]
    fn overlapping_parts_are_rejected() {
        let parts = vec![
            BeltramiPart {
                domain: Domain::disc(c(-0.3, 0.0), 0.5).unwrap(),
                coefficient: Coefficient::Constant(c(0.3, 0.0)),
            },
            BeltramiPart {
                domain: Domain::disc(c(0.3, 0.0), 0.5).unwrap(),
                coefficient: Coefficient::Constant(c(0.3, 0.0)),
            },
        ];
        assert!(BeltramiCoefficient::new(parts).is_err());
    }

    #[test]
    fn disc_solution_is_the_coefficient() {
        let g = grid(256);
        let lambda = c(0.5, 0.0);
        let mu = BeltramiCoefficient::constant(Domain::unit_disc(), lambda).unwrap();
        let sol = neumann_solve(&mu, &g, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
        assert!(sol.residual < 1e-7);
        let band = Domain::unit_disc().interior_mask(&g, 4.0 * g.spacing());
        let err = sol
            .h
            .values()
            .iter()
            .zip(&band)
            .filter(|(_, m)| **m)
            .map(|(v, _)| (v - lambda).norm() / lambda.norm())
            .fold(0.0, f64::max);
        assert!(err < 0.03, "{err}");
        // contraction ordering with 5% slack
        for w in sol.term_norms.windows(2) {
            assert!(w[1] <= 0.5 * w[0] * 1.05);
        }
    }

    #[test]
    fn residual_of_zero_h_is_one() {
        let g = grid(64);
        let mu = BeltramiCoefficient::constant(Domain::unit_disc(), c(0.5, 0.0)).unwrap();
        let r = residual(&mu, &Field::zeros(g)).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_convergence_reports_trace() {
        let g = grid(64);
        let mu = BeltramiCoefficient::constant(Domain::unit_disc(), c(0.9, 0.0)).unwrap();
        match neumann_solve(&mu, &g, 1e-14, 3) {
            Err(QcError::NonConvergence { terms, term_norms, .. }) => {
                assert_eq!(terms, 3);
                assert_eq!(term_norms.len(), 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mori_values() {
        assert_eq!(mori_exponent(0.0).unwrap(), 1.0);
        assert!((mori_exponent(1.0 / 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((mori_exponent(0.9).unwrap() - 1.0 / 19.0).abs() < 1e-15);
        assert!(mori_exponent(1.0).is_err());
        assert!(mori_exponent(-0.1).is_err());
    }
}
