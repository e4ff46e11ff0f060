use std::collections::BTreeMap;
use std::fs;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::recipes::{all_hard_passed, run_recipe, Check, RecipeContext};
use super::svg::{heatmap_svg, loglog_svg};
use super::{Command, ExperimentConfig, InputSpec, Operator, OracleKind, Outcome, SweepFunction, SweepQuantity};
use crate::beltrami::{
    jacobian_scan, neumann_solve, write_solution_archive, BeltramiCoefficient, MapEvaluator, ProblemSpec,
};
use crate::error::{QcError, Result};
use crate::field::{read_field, write_field, Field, FieldFormat, GridSpec};
use crate::geometry::{Domain, Rasterization};
use crate::regularity::{
    bilipschitz_constants, cancellation_defect, commutator_constant, flags_growth, holder_seminorm, interior_sup,
    measured_holder_exponent, theorem1_defect, write_trace_csv, write_trace_json, DistanceMode, TraceReport, TraceRow,
};
use crate::transforms::{
    beurling, beurling_power, cauchy, disc_oracle, drop_example_oracle, pv_quadrature, write_oracle_csv,
    KernelDescriptor, OracleRow,
};

const HEATMAP_PX: usize = 512;

fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Seeded probe points within `0.4·half_width` of the grid center at
/// boundary distance greater than four cells, accepted by `keep`. Farther
/// out the periodization error of `B` grows like `|z|⁴/L⁴` relative to
/// the decaying output.
fn probes(
    grid: &GridSpec,
    dom: Option<&Domain>,
    count: usize,
    seed: u64,
    keep: impl Fn(Complex64) -> bool,
) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = 4.0 * grid.spacing();
    let reach = 0.4 * grid.half_width();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count * 1000 {
        if out.len() == count {
            break;
        }
        let z = grid.center()
            + c(
                reach * (2.0 * rng.gen::<f64>() - 1.0),
                reach * (2.0 * rng.gen::<f64>() - 1.0),
            );
        if (z - grid.center()).norm() > reach || dom.is_some_and(|d| d.boundary_distance(z) <= band) || !keep(z) {
            continue;
        }
        out.push(z);
    }
    out
}

/// Evaluates the configured operator, compares it with the oracle at
/// seeded probes and writes `output.*`, `oracle.csv`, `summary.json` and
/// `heatmap.svg`.
pub fn run_transform(cfg: &ExperimentConfig) -> Result<Outcome> {
    let t = cfg
        .transform
        .as_ref()
        .ok_or_else(|| QcError::Config("missing 'transform' section".into()))?;
    let out = cfg.output_dir(Command::Transform)?;
    let (input, dom) = match &t.input {
        InputSpec::Indicator { domain } => {
            let dom = domain.build(&cfg.base_dir)?;
            (dom.indicator(&cfg.grid.build()?, Rasterization::default()), Some(dom))
        }
        InputSpec::Field { path } => (read_field(&cfg.resolve(path))?, None),
        InputSpec::Zero => (Field::zeros(cfg.grid.build()?), None),
    };
    let grid = *input.grid();
    let output = match t.operator {
        Operator::Beurling => beurling(&input),
        Operator::BeurlingPower => beurling_power(&input, t.power)?,
        Operator::Cauchy => cauchy(&input),
    };
    let power = if t.operator == Operator::Beurling { 1 } else { t.power };
    let band = 4.0 * grid.spacing();

    let rows: Vec<OracleRow> = match t.oracle {
        OracleKind::None => Vec::new(),
        OracleKind::Disc => {
            let Some(Domain::Disc { center, radius }) = dom else {
                return Err(QcError::Config("the disc oracle needs a disc indicator input".into()));
            };
            if power != 1 {
                return Err(QcError::Config("the disc oracle is for the first power only".into()));
            }
            // the periodization error grows like |z|², so probes stay within 2r
            let pts = probes(&grid, dom.as_ref(), t.probes, cfg.seed, |z| {
                let d = (z - center).norm();
                d > radius + band && d < 2.0 * radius
            });
            pts.into_iter()
                .map(|z| Ok(OracleRow::new(z, sample(&output, z)?, disc_oracle(center, radius, z)?)))
                .collect::<Result<_>>()?
        }
        OracleKind::DropExample => {
            if power != 1
                || !matches!(
                    dom,
                    Some(Domain::Cuspidal(crate::geometry::CuspModel::DiscMinusTwoDiscs))
                )
            {
                return Err(QcError::Config(
                    "the drop_example oracle needs B of the disc_minus_two_discs indicator".into(),
                ));
            }
            let d = dom.as_ref().expect("checked");
            let pts = probes(&grid, dom.as_ref(), t.probes, cfg.seed, |z| d.contains(z));
            pts.into_iter()
                .map(|z| Ok(OracleRow::new(z, sample(&output, z)?, drop_example_oracle(z)?)))
                .collect::<Result<_>>()?
        }
        OracleKind::PvQuadrature => {
            let k = KernelDescriptor::power(power)?;
            let hq = 0.5 * grid.spacing();
            let pts = probes(&grid, dom.as_ref(), t.probes, cfg.seed, |_| true);
            let (lo, hi) = support_box(&input);
            pts.into_iter()
                .map(|z| {
                    let radius = [lo, c(lo.re, hi.im), hi, c(hi.re, lo.im)]
                        .iter()
                        .map(|p| (z - p).norm())
                        .fold(0.0, f64::max);
                    let reference = match &dom {
                        Some(d) => pv_quadrature(|w| c(if d.contains(w) { 1.0 } else { 0.0 }, 0.0), &k, z, radius, hq),
                        None => pv_quadrature(|w| input.interpolate(w).unwrap_or_default(), &k, z, radius, hq),
                    };
                    Ok(OracleRow::new(z, sample(&output, z)?, reference))
                })
                .collect::<Result<_>>()?
        }
    };

    let header = write_field(&output, &out, "output", FieldFormat::Binary)?;
    let mut files = vec![header];
    let max_err = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    if !rows.is_empty() {
        let p = out.join("oracle.csv");
        write_oracle_csv(&p, &rows)?;
        files.push(p);
    }
    let passed = match t.tolerance {
        Some(tol) => !rows.is_empty() && max_err <= tol,
        None => true,
    };
    let summary = json!({
        "operator": t.operator,
        "power": power,
        "oracle": t.oracle,
        "probes": rows.len(),
        "max_rel_error": if rows.is_empty() { None } else { Some(max_err) },
        "mean_rel_error": if rows.is_empty() { None } else { Some(rows.iter().map(|r| r.rel_error).sum::<f64>() / rows.len() as f64) },
        "tolerance": t.tolerance,
        "sup_output": output.sup_norm(),
        "seed": cfg.seed,
        "passed": passed,
    });
    let p = out.join("summary.json");
    write_json(&p, &summary)?;
    files.push(p);
    let p = out.join("heatmap.svg");
    fs::write(&p, heatmap_svg(&output, "|output|", HEATMAP_PX)?)?;
    files.push(p);
    Ok(Outcome { passed, files })
}

fn sample(f: &Field, z: Complex64) -> Result<Complex64> {
    f.interpolate(z)
        .ok_or_else(|| QcError::OutsideReliableRegion(z.to_string()))
}

/// Bounding box of the nonzero nodes (the whole grid for a zero field).
fn support_box(f: &Field) -> (Complex64, Complex64) {
    let g = f.grid();
    let (mut lo, mut hi) = (c(f64::INFINITY, f64::INFINITY), c(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for (i, v) in f.values().iter().enumerate() {
        if v.norm() > 0.0 {
            let z = g.node_at(i);
            lo = c(lo.re.min(z.re), lo.im.min(z.im));
            hi = c(hi.re.max(z.re), hi.im.max(z.im));
        }
    }
    if lo.re.is_finite() {
        (lo - g.spacing(), hi + g.spacing())
    } else {
        (g.origin(), g.origin() + c(g.side(), g.side()))
    }
}

/// Solves the configured problem and writes the solution archive,
/// `summary.json` and heatmaps of `|h|` and `|Φ − z|`.
pub fn run_solve(cfg: &ExperimentConfig) -> Result<Outcome> {
    let path = cfg.resolve(
        cfg.problem
            .as_deref()
            .ok_or_else(|| QcError::Config("missing 'problem'".into()))?,
    );
    let problem = ProblemSpec::from_file(&path)?;
    let grid = cfg.grid.apply(problem.grid).build()?;
    let mu: BeltramiCoefficient = problem.coefficient(path.parent().unwrap_or(&cfg.base_dir))?;
    let out = cfg.output_dir(Command::Solve)?;
    let sol = neumann_solve(&mu, &grid, problem.tol, problem.max_terms)?;
    let archive = write_solution_archive(&sol, &out)?;
    let correction = MapEvaluator::new(sol.clone()).stages()[0].correction().clone();
    // ∂Φ jumps across the support boundary; scan inside it
    let region = match mu.support() {
        Some(d) => d,
        None => Domain::square(grid.center(), grid.half_width())?,
    };
    let scan = jacobian_scan(&sol, &region, 4.0 * grid.spacing())?;
    let summary = json!({
        "k": sol.k(),
        "terms_used": sol.terms_used,
        "residual": sol.residual,
        "tol": sol.tol,
        "min_jacobian": scan.min_jacobian,
        "min_dphi": scan.min_dphi,
        "jacobian_nodes": scan.nodes,
        "sup_correction": correction.sup_norm(),
    });
    let mut files = vec![archive];
    let p = out.join("summary.json");
    write_json(&p, &summary)?;
    files.push(p);
    for (name, f, title) in [("h.svg", &sol.h, "|h|"), ("correction.svg", &correction, "|Φ(z) − z|")] {
        let p = out.join(name);
        fs::write(&p, heatmap_svg(f, title, HEATMAP_PX)?)?;
        files.push(p);
    }
    Ok(Outcome {
        passed: scan.min_jacobian > 0.0,
        files,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub recipe: String,
    pub seed: u64,
    pub grid_n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Runs the configured recipe and writes `verify.json`.
pub fn run_verify(cfg: &ExperimentConfig) -> Result<(Outcome, VerifyReport)> {
    let v = cfg
        .verify
        .as_ref()
        .ok_or_else(|| QcError::Config("missing 'verify' section".into()))?;
    let ctx = RecipeContext {
        n: cfg.grid.n.unwrap_or(1024),
        half_width: cfg.grid.half_width,
        seed: cfg.seed,
    };
    let out = cfg.output_dir(Command::Verify)?;
    let checks = run_recipe(&v.recipe, &ctx)?;
    for ch in &checks {
        log::info!(
            "{} {}: {} ({})",
            v.recipe,
            ch.name,
            if ch.passed { "pass" } else { "FAIL" },
            ch.threshold
        );
    }
    let report = VerifyReport {
        recipe: v.recipe.clone(),
        seed: cfg.seed,
        grid_n: ctx.n,
        half_width: ctx.half_width,
        passed: all_hard_passed(&checks),
        checks,
    };
    let p = out.join("verify.json");
    write_json(&p, &report)?;
    Ok((
        Outcome {
            passed: report.passed,
            files: vec![p],
        },
        report,
    ))
}

/// Measures the configured quantity on each grid size and writes
/// `trace.csv`, `trace.json` and `trace.svg`. A `grid.n` override caps the
/// sizes.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<(Outcome, TraceReport)> {
    let s = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| QcError::Config("missing 'sweep' section".into()))?;
    let dom = s.domain.build(&cfg.base_dir)?;
    let out = cfg.output_dir(Command::Sweep)?;
    let mut sizes: Vec<usize> = s
        .grid_sizes
        .iter()
        .copied()
        .filter(|&n| cfg.grid.n.is_none_or(|cap| n <= cap))
        .collect();
    sizes.sort_unstable();
    if sizes.is_empty() {
        return Err(QcError::Config(format!(
            "no sweep grid size is at most grid n = {}",
            cfg.grid.n.unwrap_or_default()
        )));
    }
    let mut rows = Vec::new();
    for &n in &sizes {
        let grid = cfg.grid.apply(Default::default()).build()?.with_n(n)?;
        let values = measure(s, &dom, &grid, cfg.seed)?;
        log::info!("sweep {:?} n={n}: {values:?}", s.quantity);
        rows.push(TraceRow {
            n,
            spacing: grid.spacing(),
            values,
        });
    }
    let key = primary_key(s.quantity);
    let primary: Vec<f64> = rows.iter().map(|r| r.values[key]).collect();
    let lo = primary.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = primary.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let flags = BTreeMap::from([
        ("growth".to_string(), flags_growth(&primary)),
        ("decreasing".to_string(), primary.windows(2).all(|w| w[1] < w[0])),
        ("flat10".to_string(), lo > 0.0 && hi / lo <= 1.10),
    ]);
    let parameters = BTreeMap::from([
        ("quantity".to_string(), json!(s.quantity)),
        ("domain".to_string(), serde_json::to_value(&s.domain)?),
        ("lambda".to_string(), json!(s.lambda)),
        ("pairs".to_string(), json!(s.pairs)),
        ("exponent".to_string(), json!(s.exponent)),
        ("power".to_string(), json!(s.power)),
        ("function".to_string(), json!(s.function)),
        (
            "half_width".to_string(),
            json!(cfg.grid.apply(Default::default()).half_width),
        ),
    ]);
    let report = TraceReport {
        quantity: key.to_string(),
        seed: cfg.seed,
        parameters,
        rows,
        flags,
    };
    let csv = out.join("trace.csv");
    write_trace_csv(&csv, &report.rows)?;
    let js = out.join("trace.json");
    write_trace_json(&js, &report)?;
    let keys: Vec<&String> = report.rows[0].values.keys().collect();
    let series: Vec<(String, Vec<(f64, f64)>)> = keys
        .iter()
        .map(|k| {
            (
                (*k).clone(),
                report.rows.iter().map(|r| (r.n as f64, r.values[*k])).collect(),
            )
        })
        .collect();
    let svg = out.join("trace.svg");
    fs::write(
        &svg,
        loglog_svg(&series, &format!("{key} under refinement"), "grid n", key),
    )?;
    Ok((
        Outcome {
            passed: true,
            files: vec![csv, js, svg],
        },
        report,
    ))
}

fn primary_key(q: SweepQuantity) -> &'static str {
    match q {
        SweepQuantity::Bilipschitz => "lower",
        SweepQuantity::HolderSeminorm => "seminorm",
        SweepQuantity::Cancellation => "defect",
        SweepQuantity::Theorem1 => "relative_sup",
        SweepQuantity::Exponent => "exponent",
        SweepQuantity::Commutator => "constant",
    }
}

fn measure(s: &super::SweepSection, dom: &Domain, grid: &GridSpec, seed: u64) -> Result<BTreeMap<String, f64>> {
    let mut v = BTreeMap::new();
    let map = |lambda: f64| -> Result<MapEvaluator> {
        let mu = BeltramiCoefficient::constant(dom.clone(), c(lambda, 0.0))?;
        Ok(MapEvaluator::new(neumann_solve(
            &mu,
            grid,
            crate::beltrami::DEFAULT_TOL,
            crate::beltrami::DEFAULT_MAX_TERMS,
        )?))
    };
    match s.quantity {
        SweepQuantity::Bilipschitz => {
            let r = bilipschitz_constants(&map(s.lambda)?, dom, s.pairs, 4.0 * grid.spacing(), seed)?;
            v.insert("lower".into(), r.lower);
            v.insert("upper".into(), r.upper);
        }
        SweepQuantity::Exponent => {
            v.insert(
                "exponent".into(),
                measured_holder_exponent(&map(s.lambda)?, dom, s.pairs, seed)?,
            );
        }
        SweepQuantity::HolderSeminorm => {
            let f = match s.function {
                SweepFunction::Indicator => dom.indicator(grid, Rasterization::default()),
                SweepFunction::BeurlingIndicator => beurling(&dom.indicator(grid, Rasterization::default())),
                SweepFunction::DropExample => Field::sample(*grid, |z| drop_example_oracle(z).unwrap_or_default())?,
            };
            let e = holder_seminorm(&f, dom, s.exponent, s.pairs, DistanceMode::Euclidean, seed)?;
            v.insert("seminorm".into(), e.value);
        }
        SweepQuantity::Cancellation => {
            v.insert("defect".into(), cancellation_defect(dom, grid, s.power)?);
        }
        SweepQuantity::Theorem1 => {
            let chi = dom.indicator(grid, Rasterization::default());
            let sup = interior_sup(&theorem1_defect(&chi, dom, s.power)?, dom)?;
            v.insert("relative_sup".into(), sup / chi.sup_norm());
        }
        SweepQuantity::Commutator => {
            let a = Field::sample(*grid, |z| c(z.re, 0.0))?;
            let f = dom.indicator(grid, Rasterization::default());
            let e = commutator_constant(&a, &f, dom, s.exponent, s.exponent, s.pairs, seed)?;
            v.insert("constant".into(), e.constant);
            v.insert("commutator_norm".into(), e.commutator_norm);
        }
    }
    Ok(v)
}
