//! Measurements on sampled fields and maps: Hölder seminorms, bilipschitz
//! constants, Hölder exponents and the defects of the cancellation
//! identities for `B`.

mod pairs;
mod report;

pub use pairs::{PairSampler, BINS, MIN_NODES};
pub use report::{write_trace_csv, write_trace_json, TraceReport, TraceRow};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beltrami::MapEvaluator;
use crate::error::{QcError, Result};
use crate::field::{Field, GridSpec};
use crate::geometry::{Domain, GeodesicMap, Rasterization};
use crate::transforms::{beurling, beurling_power, commutator, KernelDescriptor};

/// Boundary band, in grid cells, excluded from every measurement.
pub const BAND_CELLS: f64 = 4.0;

/// Fewest pairs accepted by the seminorm and bilipschitz estimators.
pub const MIN_PAIRS: usize = 1000;

/// Fewest pairs accepted by [`measured_holder_exponent`].
pub const MIN_EXPONENT_PAIRS: usize = 5000;

/// Short-range cutoff of [`measured_holder_exponent`], relative to the
/// domain diameter.
pub const SHORT_RANGE: f64 = 0.1;

/// Sources of the distance maps used in geodesic mode.
pub const GEODESIC_SOURCES: usize = 32;

/// Consecutive trace ratio that counts as growth.
pub const GROWTH_RATIO: f64 = 1.5;

pub const DEFAULT_SEED: u64 = 20240607;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    Euclidean,
    Geodesic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormEstimate {
    pub exponent: f64,
    pub value: f64,
    pub pairs_used: usize,
    pub distance_mode: DistanceMode,
    pub seed: u64,
    /// `(n, value)` per refinement level.
    pub trace: Vec<(usize, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BilipschitzReport {
    pub lower: f64,
    pub upper: f64,
    pub pairs_used: usize,
    pub band: f64,
}

fn band_of(grid: &GridSpec) -> f64 {
    BAND_CELLS * grid.spacing()
}

fn check_pairs(pairs: usize, min: usize) -> Result<()> {
    if pairs < min {
        return Err(QcError::InvalidArgument(format!(
            "need at least {min} pairs, got {pairs}"
        )));
    }
    Ok(())
}

/// `σ_ε(f) = sup |f(z)−f(w)| / d(z,w)^ε` over sampled pairs of nodes of
/// `dom` at boundary distance greater than four cells.
pub fn holder_seminorm(
    f: &Field,
    dom: &Domain,
    eps: f64,
    pairs: usize,
    mode: DistanceMode,
    seed: u64,
) -> Result<SeminormEstimate> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(QcError::InvalidArgument(format!(
            "exponent must lie in (0, 1], got {eps}"
        )));
    }
    check_pairs(pairs, MIN_PAIRS)?;
    let grid = *f.grid();
    let sampler = PairSampler::new(grid, dom.interior_mask(&grid, band_of(&grid)), None)?;
    let vals = f.values();
    let quotient = |a: usize, b: usize, d: f64| (vals[a] - vals[b]).norm() / d.powf(eps);
    let (value, used) = match mode {
        DistanceMode::Euclidean => {
            let list = sampler.sample(pairs, seed, None);
            let value = list
                .iter()
                .map(|&(a, b)| quotient(a, b, (grid.node_at(a) - grid.node_at(b)).norm()))
                .fold(0.0, f64::max);
            (value, list.len())
        }
        DistanceMode::Geodesic => {
            let sources = sampler.sources(GEODESIC_SOURCES, seed);
            let list = sampler.sample(pairs, seed, Some(&sources));
            let geo = GeodesicMap::new(dom, &grid);
            let mut unique = sources.clone();
            unique.sort_unstable();
            unique.dedup();
            let per_source: Vec<(f64, usize)> = unique
                .par_iter()
                .map(|&s| {
                    let dist = geo.distances_from(s);
                    list.iter()
                        .filter(|(a, _)| *a == s)
                        .filter(|(_, b)| dist[*b].is_finite())
                        .fold((0.0f64, 0usize), |(m, k), &(a, b)| {
                            (m.max(quotient(a, b, dist[b])), k + 1)
                        })
                })
                .collect();
            per_source
                .into_iter()
                .fold((0.0, 0), |(m, k), (v, c)| (f64::max(m, v), k + c))
        }
    };
    if used == 0 {
        return Err(QcError::InsufficientSamples("no connected pairs".into()));
    }
    Ok(SeminormEstimate {
        exponent: eps,
        value,
        pairs_used: used,
        distance_mode: mode,
        seed,
        trace: vec![(grid.n(), value)],
    })
}

/// Joins single-level estimates into one refinement trace; the value is
/// that of the finest level.
pub fn merge_trace(levels: &[SeminormEstimate]) -> Result<SeminormEstimate> {
    let last = levels
        .last()
        .ok_or_else(|| QcError::InvalidArgument("empty refinement trace".into()))?;
    let mut out = last.clone();
    out.trace = levels.iter().flat_map(|e| e.trace.iter().copied()).collect();
    out.pairs_used = levels.iter().map(|e| e.pairs_used).sum();
    Ok(out)
}

/// Ratios of consecutive trace values.
pub fn trace_ratios(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] / w[0]).collect()
}

/// Growth flag: two consecutive ratios at least [`GROWTH_RATIO`].
pub fn flags_growth(values: &[f64]) -> bool {
    trace_ratios(values)
        .windows(2)
        .any(|r| r[0] >= GROWTH_RATIO && r[1] >= GROWTH_RATIO)
}

fn map_values(ev: &MapEvaluator, grid: &GridSpec, nodes: &[usize]) -> Result<Vec<Option<Complex64>>> {
    if ev.grid() != grid {
        return Err(QcError::GridMismatch("sampler and map grids differ".into()));
    }
    let mut vals = vec![None; grid.len()];
    let computed: Vec<(usize, Complex64)> = nodes
        .par_iter()
        .map(|&i| {
            let z = grid.node_at(i);
            ev.evaluate(z).map(|w| (i, w))
        })
        .collect::<Result<_>>()?;
    for (i, w) in computed {
        vals[i] = Some(w);
    }
    Ok(vals)
}

/// Ratios `|Φ(z)−Φ(w)|/|z−w|` for explicit node pairs.
pub fn pair_ratios(ev: &MapEvaluator, pairs: &[(usize, usize)]) -> Result<Vec<f64>> {
    let grid = *ev.grid();
    pairs
        .iter()
        .map(|&(a, b)| {
            let (z, w) = (grid.node_at(a), grid.node_at(b));
            Ok((ev.evaluate(z)? - ev.evaluate(w)?).norm() / (z - w).norm())
        })
        .collect()
}

/// Extreme ratios `|Φ(z)−Φ(w)|/|z−w|` over sampled node pairs of `dom` at
/// boundary distance greater than `band`.
pub fn bilipschitz_constants(
    ev: &MapEvaluator,
    dom: &Domain,
    pairs: usize,
    band: f64,
    seed: u64,
) -> Result<BilipschitzReport> {
    check_pairs(pairs, MIN_PAIRS)?;
    let grid = *ev.grid();
    if band < band_of(&grid) * (1.0 - 1e-12) {
        return Err(QcError::InvalidArgument(format!(
            "band {band} is below four grid cells ({})",
            band_of(&grid)
        )));
    }
    let sampler = PairSampler::new(grid, dom.interior_mask(&grid, band), None)?;
    let list = sampler.sample(pairs, seed, None);
    let phi = map_values(ev, &grid, sampler.nodes())?;
    let (mut lower, mut upper) = (f64::INFINITY, 0.0f64);
    for &(a, b) in &list {
        let (pa, pb) = (phi[a].expect("sampled"), phi[b].expect("sampled"));
        let r = (pa - pb).norm() / (grid.node_at(a) - grid.node_at(b)).norm();
        lower = lower.min(r);
        upper = upper.max(r);
    }
    if !(lower.is_finite() && upper > 0.0) {
        return Err(QcError::InsufficientSamples("degenerate pair set".into()));
    }
    Ok(BilipschitzReport {
        lower,
        upper,
        pairs_used: list.len(),
        band,
    })
}

/// Least-squares slope of `log|Φ(z)−Φ(w)|` against `log|z−w|` over
/// sampled pairs with `|z−w| ≤ 0.1·diam(dom)`.
pub fn measured_holder_exponent(ev: &MapEvaluator, dom: &Domain, pairs: usize, seed: u64) -> Result<f64> {
    check_pairs(pairs, MIN_EXPONENT_PAIRS)?;
    let grid = *ev.grid();
    let reach = SHORT_RANGE * dom.diameter();
    let sampler = PairSampler::new(grid, dom.interior_mask(&grid, band_of(&grid)), Some(reach))?;
    let list = sampler.sample(pairs, seed, None);
    let phi = map_values(ev, &grid, sampler.nodes())?;
    let pts: Vec<(f64, f64)> = list
        .iter()
        .filter_map(|&(a, b)| {
            let d = (grid.node_at(a) - grid.node_at(b)).norm();
            let m = (phi[a]? - phi[b]?).norm();
            (d <= reach && m > 0.0).then(|| (d.ln(), m.ln()))
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if pts.len() < 2 || !(sxx > 0.0) {
        return Err(QcError::InsufficientSamples("too few short-range pairs".into()));
    }
    Ok(sxy / sxx)
}

/// Sup of `|f|` over nodes of `dom` at boundary distance greater than four
/// cells.
pub fn interior_sup(f: &Field, dom: &Domain) -> Result<f64> {
    let grid = f.grid();
    let mask = dom.interior_mask(grid, band_of(grid));
    let mut any = false;
    let sup = f
        .values()
        .iter()
        .zip(&mask)
        .filter(|(_, m)| **m)
        .inspect(|_| any = true)
        .map(|(v, _)| v.norm())
        .fold(0.0, f64::max);
    if !any {
        return Err(QcError::InsufficientSamples(
            "no interior nodes outside the band".into(),
        ));
    }
    Ok(sup)
}

/// `K_n f = B_Ωⁿ f − χ_Ω·Bⁿ f`, where `B_Ω` applies `B` and then
/// restricts to Ω.
pub fn theorem1_defect(f: &Field, dom: &Domain, n: u32) -> Result<Field> {
    if n == 0 {
        return Err(QcError::InvalidArgument("theorem1_defect needs n >= 1".into()));
    }
    let chi = dom.indicator(f.grid(), Rasterization::default());
    let mut g = f.clone();
    for _ in 0..n {
        g = beurling(&g).mul(&chi)?;
    }
    g.sub(&beurling_power(f, n)?.mul(&chi)?)
}

/// Interior sup of `|Bⁿ χ_Ω|` on Ω.
pub fn cancellation_defect(dom: &Domain, grid: &GridSpec, n: u32) -> Result<f64> {
    let chi = dom.indicator(grid, Rasterization::default());
    interior_sup(&beurling_power(&chi, n)?, dom)
}

/// `sup|f| + σ_ε(f)` on the interior of `dom`.
pub fn lipschitz_norm(f: &Field, dom: &Domain, eps: f64, pairs: usize, seed: u64) -> Result<f64> {
    Ok(interior_sup(f, dom)? + holder_seminorm(f, dom, eps, pairs, DistanceMode::Euclidean, seed)?.value)
}

/// Terms of `‖[B,a]f‖_α ≤ C·σ_α(a)·‖f‖_β` on one grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorEstimate {
    pub commutator_norm: f64,
    pub sigma_a: f64,
    pub f_norm: f64,
    pub constant: f64,
}

pub fn commutator_constant(
    a: &Field,
    f: &Field,
    dom: &Domain,
    alpha: f64,
    beta: f64,
    pairs: usize,
    seed: u64,
) -> Result<CommutatorEstimate> {
    let comm = commutator(a, f, dom, &KernelDescriptor::Power(1))?;
    let commutator_norm = lipschitz_norm(&comm, dom, alpha, pairs, seed)?;
    let sigma_a = holder_seminorm(a, dom, alpha, pairs, DistanceMode::Euclidean, seed)?.value;
    let f_norm = lipschitz_norm(f, dom, beta, pairs, seed)?;
    if !(sigma_a > 0.0 && f_norm > 0.0) {
        return Err(QcError::InvalidArgument("σ_α(a) and ‖f‖_β must be positive".into()));
    }
    Ok(CommutatorEstimate {
        commutator_norm,
        sigma_a,
        f_norm,
        constant: commutator_norm / (sigma_a * f_norm),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beltrami::{neumann_solve, BeltramiCoefficient, DEFAULT_MAX_TERMS, DEFAULT_TOL};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(c(0.0, 0.0), 4.0, n).unwrap()
    }

    fn disc_map(n: usize, lambda: f64) -> MapEvaluator {
        let mu = BeltramiCoefficient::constant(Domain::unit_disc(), c(lambda, 0.0)).unwrap();
        MapEvaluator::new(neumann_solve(&mu, &grid(n), DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap())
    }

    #[test]
    fn identity_seminorm_is_one() {
        let g = grid(128);
        let f = Field::coordinates(g);
        let d = Domain::unit_disc();
        let e = holder_seminorm(&f, &d, 1.0, 1000, DistanceMode::Euclidean, 1).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        let geo = holder_seminorm(&f, &d, 1.0, 1000, DistanceMode::Geodesic, 1).unwrap();
        assert!((geo.value - 1.0).abs() < 0.02, "{}", geo.value);
        let z = holder_seminorm(
            &Field::constant(g, c(3.0, 0.0)),
            &d,
            0.5,
            1000,
            DistanceMode::Euclidean,
            1,
        )
        .unwrap();
        assert_eq!(z.value, 0.0);
        assert!(holder_seminorm(&f, &d, 1.5, 1000, DistanceMode::Euclidean, 1).is_err());
        assert!(holder_seminorm(&f, &d, 1.0, 999, DistanceMode::Euclidean, 1).is_err());
    }

    #[test]
    fn seminorm_grows_with_pairs() {
        let g = grid(128);
        let f = Field::sample(g, |z| c(z.norm().sqrt(), 0.0)).unwrap();
        let d = Domain::unit_disc();
        let mut last = 0.0;
        for pairs in [1000, 2000, 4000] {
            let v = holder_seminorm(&f, &d, 0.8, pairs, DistanceMode::Euclidean, 3)
                .unwrap()
                .value;
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn bilipschitz_of_identity_and_disc_map() {
        let id = disc_map(128, 0.0);
        let band = 4.0 * id.grid().spacing();
        let r = bilipschitz_constants(&id, &Domain::unit_disc(), 1000, band, 1).unwrap();
        assert!((r.lower - 1.0).abs() < 0.01 && (r.upper - 1.0).abs() < 0.01, "{r:?}");

        let ev = disc_map(256, 0.5);
        let band = 4.0 * ev.grid().spacing();
        let r = bilipschitz_constants(&ev, &Domain::unit_disc(), 2000, band, 1).unwrap();
        assert!(r.upper <= 1.5 * 1.03 && r.lower >= 0.5 * 0.97, "{r:?}");
        assert!(bilipschitz_constants(&ev, &Domain::unit_disc(), 2000, band / 2.0, 1).is_err());
    }

    #[test]
    fn swapped_pairs_give_the_same_ratio() {
        let ev = disc_map(128, 0.5);
        let g = *ev.grid();
        let s = PairSampler::new(g, Domain::unit_disc().interior_mask(&g, 4.0 * g.spacing()), None).unwrap();
        let list = s.sample(200, 2, None);
        let swapped: Vec<_> = list.iter().map(|&(a, b)| (b, a)).collect();
        assert_eq!(pair_ratios(&ev, &list).unwrap(), pair_ratios(&ev, &swapped).unwrap());
    }

    #[test]
    fn exponent_of_identity_and_affine_maps() {
        let id = disc_map(128, 0.0);
        let a = measured_holder_exponent(&id, &Domain::unit_disc(), 5000, 1).unwrap();
        assert!((a - 1.0).abs() < 1e-9);
        let ev = disc_map(256, 0.5);
        let a = measured_holder_exponent(&ev, &Domain::unit_disc(), 5000, 1).unwrap();
        assert!((a - 1.0).abs() < 0.05, "{a}");
        assert!(measured_holder_exponent(&ev, &Domain::unit_disc(), 4999, 1).is_err());
    }

    #[test]
    fn defects_on_the_disc() {
        let g = grid(256);
        let d = Domain::unit_disc();
        let chi = d.indicator(&g, Rasterization::default());
        assert!(cancellation_defect(&d, &g, 1).unwrap() < 0.05);
        let k = theorem1_defect(&chi, &d, 2).unwrap();
        assert!(interior_sup(&k, &d).unwrap() < 0.1);
        let zero = theorem1_defect(&Field::zeros(g), &d, 3).unwrap();
        assert_eq!(zero.sup_norm(), 0.0);
        assert!(theorem1_defect(&chi, &d, 0).is_err());
    }

    #[test]
    fn theorem1_defect_is_linear() {
        let g = grid(128);
        let d = Domain::unit_disc();
        let f1 = d.indicator(&g, Rasterization::default());
        let f2 = Field::sample(g, |z| if z.norm() < 1.0 { z * z } else { c(0.0, 0.0) }).unwrap();
        let s = c(0.3, -2.0);
        let lhs = theorem1_defect(&f1.add(&f2.scale(s)).unwrap(), &d, 2).unwrap();
        let rhs = theorem1_defect(&f1, &d, 2)
            .unwrap()
            .add(&theorem1_defect(&f2, &d, 2).unwrap().scale(s))
            .unwrap();
        assert!(lhs.sub(&rhs).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn growth_flag_policy() {
        assert!(flags_growth(&[1.0, 1.6, 2.6]));
        assert!(!flags_growth(&[1.0, 1.6, 2.0]));
        assert!(!flags_growth(&[1.0, 1.0, 1.0, 1.0]));
    }
}
