//! The `qclab` binary: exit codes, overrides and reproducible outputs.

use std::fs;
use std::path::Path;
use std::process::Command;

fn qclab(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qclab"))
        .args(args)
        .env("QCLAB_LOG", "error")
        .env("QCLAB_THREADS", "2")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn passing_verify_exits_zero_and_honours_grid_n() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "v.json",
        r#"{"command": "verify", "verify": {"recipe": "mori-identity"}}"#,
    );
    let out = dir.path().join("out");
    let (code, err) = qclab(&[
        "verify",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--grid-n",
        "128",
        "--seed",
        "5",
    ]);
    assert_eq!(code, 0, "{err}");
    let report: serde_json::Value = serde_json::from_slice(&fs::read(out.join("verify.json")).unwrap()).unwrap();
    assert_eq!(report["grid_n"], 128);
    assert_eq!(report["seed"], 5);
    assert_eq!(report["passed"], true);
}

#[test]
fn failed_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "t.json",
        r#"{"grid": {"half_width": 8.0, "n": 128},
            "transform": {"input": {"kind": "indicator", "domain": {"shape": "disc", "center": [0, 0], "radius": 1}},
                          "oracle": "disc", "probes": 10, "tolerance": 1e-9}}"#,
    );
    let (code, err) = qclab(&[
        "transform",
        "--config",
        &cfg,
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(code, 1, "{err}");
    assert!(dir.path().join("o/oracle.csv").exists());
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(qclab(&["verify", "--config", missing.to_str().unwrap()]).0, 2);

    let typo = write(
        dir.path(),
        "a.json",
        r#"{"verify": {"recipe": "mori-identity"}, "sed": 1}"#,
    );
    assert_eq!(qclab(&["verify", "--config", &typo]).0, 2);

    let recipe = write(dir.path(), "b.json", r#"{"verify": {"recipe": "no-such-recipe"}}"#);
    let (code, err) = qclab(&["verify", "--config", &recipe]);
    assert_eq!(code, 2);
    assert!(err.contains("known recipes"), "{err}");

    let problem = write(dir.path(), "c.json", r#"{"problem": "missing-problem.json"}"#);
    assert_eq!(qclab(&["solve", "--config", &problem]).0, 2);

    let big = write(
        dir.path(),
        "d.json",
        r#"{"memory_budget_mb": 1, "sweep": {"quantity": "cancellation", "grid_sizes": [1024],
            "domain": {"shape": "disc", "center": [0, 0], "radius": 1}}}"#,
    );
    assert_eq!(qclab(&["sweep", "--config", &big]).0, 2);

    assert_eq!(qclab(&["frobnicate"]).0, 2);
}

#[test]
fn solve_writes_an_archive_beside_the_config() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "problem.json",
        r#"{"grid": {"n": 128},
            "parts": [{"domain": {"shape": "disc", "center": [0, 0], "radius": 1}, "coefficient": {"constant": [0.3, 0]}}]}"#,
    );
    let cfg = write(
        dir.path(),
        "s.json",
        r#"{"command": "solve", "problem": "problem.json"}"#,
    );
    let (code, err) = qclab(&["solve", "--config", &cfg]);
    assert_eq!(code, 0, "{err}");
    let out = dir.path().join("out/solve");
    for f in ["solution.json", "summary.json", "h.svg", "correction.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let archive = qclab::beltrami::read_solution_archive(&out).unwrap();
    assert_eq!(archive.diagnostics.grid.n, 128);
}

#[test]
fn sweeps_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "w.json",
        r#"{"sweep": {"quantity": "holder_seminorm", "grid_sizes": [64, 128], "pairs": 2000,
            "domain": {"shape": "disc", "center": [0, 0], "radius": 1}}}"#,
    );
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let (code, err) = qclab(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        outputs.push(["trace.csv", "trace.json", "trace.svg"].map(|f| fs::read(out.join(f)).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}
