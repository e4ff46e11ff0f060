//! Batch experiments driven by JSON configs: transform evaluation, Beltrami
//! solves, verification recipes and refinement sweeps. Each run writes its
//! artifacts into one output directory.

mod recipes;
mod run;
pub mod svg;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::beltrami::GridConfig;
use crate::error::{QcError, Result};
use crate::field::GridSpec;
use crate::geometry::DomainSpec;
use crate::regularity::DEFAULT_SEED;

pub use recipes::{all_hard_passed, run_recipe, Check, RecipeContext, RECIPES};
pub use run::{run_solve, run_sweep, run_transform, run_verify, VerifyReport};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "QCLAB_THREADS";

/// Default memory budget for sweeps, in MiB.
pub const DEFAULT_MEMORY_BUDGET_MB: usize = 2048;

/// Complex fields held at once by the most demanding sweep (a Beltrami solve
/// plus its FFT scratch and map evaluation); used for the memory estimate.
pub const FIELDS_PER_LEVEL: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Transform,
    Solve,
    Verify,
    Sweep,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Transform => "transform",
            Command::Solve => "solve",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
        })
    }
}

/// Grid fields that override a recipe's or problem's own grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    #[serde(default)]
    pub center: Option<[f64; 2]>,
    #[serde(default)]
    pub half_width: Option<f64>,
    #[serde(default)]
    pub n: Option<usize>,
}

impl GridOverrides {
    pub fn apply(&self, base: GridConfig) -> GridConfig {
        GridConfig {
            center: self.center.unwrap_or(base.center),
            half_width: self.half_width.unwrap_or(base.half_width),
            n: self.n.unwrap_or(base.n),
        }
    }

    pub fn build(&self) -> Result<GridSpec> {
        self.apply(GridConfig::default()).build()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    #[default]
    Beurling,
    BeurlingPower,
    Cauchy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSpec {
    Indicator {
        domain: DomainSpec,
    },
    /// Header path of a field file.
    Field {
        path: PathBuf,
    },
    Zero,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    /// Closed form for a disc indicator.
    Disc,
    /// Lattice quadrature of the principal value.
    PvQuadrature,
    /// Closed form for the disc minus two discs.
    DropExample,
    #[default]
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSection {
    #[serde(default)]
    pub operator: Operator,
    #[serde(default = "default_power")]
    pub power: u32,
    pub input: InputSpec,
    #[serde(default)]
    pub oracle: OracleKind,
    #[serde(default = "default_probes")]
    pub probes: usize,
    /// Maximum relative oracle error; the run fails above it. Unset means
    /// report only.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub recipe: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepQuantity {
    /// Lower and upper ratios of the map for `μ = λχ_Ω`.
    Bilipschitz,
    /// `σ_ε` of a sampled function on Ω.
    HolderSeminorm,
    /// Interior sup of `Bⁿχ_Ω`.
    Cancellation,
    /// Interior sup of `K_nχ_Ω` relative to `‖χ_Ω‖∞`.
    Theorem1,
    /// Measured Hölder exponent of the map for `μ = λχ_Ω`.
    Exponent,
    /// Commutator constant for `a = Re z`, `f = χ_Ω`.
    Commutator,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepFunction {
    /// FFT `B(χ_Ω)`.
    #[default]
    BeurlingIndicator,
    Indicator,
    /// The printed closed form for the disc minus two discs, zero in the
    /// removed discs.
    DropExample,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub quantity: SweepQuantity,
    pub grid_sizes: Vec<usize>,
    pub domain: DomainSpec,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    /// Hölder exponent ε (α for the commutator).
    #[serde(default = "default_exponent")]
    pub exponent: f64,
    /// Power n for `cancellation` and `theorem1`.
    #[serde(default = "default_power")]
    pub power: u32,
    #[serde(default)]
    pub function: SweepFunction,
}

fn default_power() -> u32 {
    1
}

fn default_probes() -> usize {
    50
}

fn default_lambda() -> f64 {
    0.9
}

fn default_pairs() -> usize {
    20_000
}

fn default_exponent() -> f64 {
    0.75
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_budget() -> usize {
    DEFAULT_MEMORY_BUDGET_MB
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// When present it must match the command the config is run with.
    #[serde(default)]
    pub command: Option<Command>,
    /// Problem JSON for `solve`.
    #[serde(default)]
    pub problem: Option<PathBuf>,
    #[serde(default)]
    pub grid: GridOverrides,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub memory_budget_mb: usize,
    #[serde(default)]
    pub transform: Option<TransformSection>,
    #[serde(default)]
    pub verify: Option<VerifySection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    /// Directory that relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            problem: None,
            grid: GridOverrides::default(),
            output_dir: None,
            seed: DEFAULT_SEED,
            memory_budget_mb: DEFAULT_MEMORY_BUDGET_MB,
            transform: None,
            verify: None,
            sweep: None,
            base_dir: PathBuf::from("."),
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| QcError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: Self =
            serde_json::from_str(&text).map_err(|e| QcError::Config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        if cfg.base_dir.as_os_str().is_empty() {
            cfg.base_dir = PathBuf::from(".");
        }
        Ok(cfg)
    }

    /// Applies command-line overrides.
    pub fn with_overrides(mut self, out: Option<PathBuf>, seed: Option<u64>, grid_n: Option<usize>) -> Self {
        if out.is_some() {
            self.output_dir = out;
        }
        if let Some(s) = seed {
            self.seed = s;
        }
        if grid_n.is_some() {
            self.grid.n = grid_n;
        }
        self
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Output directory, created if missing. Defaults to `out/<command>`
    /// beside the config.
    pub fn output_dir(&self, command: Command) -> Result<PathBuf> {
        let dir = match &self.output_dir {
            Some(p) => self.resolve(p),
            None => self.base_dir.join("out").join(command.to_string()),
        };
        fs::create_dir_all(&dir)
            .map_err(|e| QcError::Config(format!("output directory {} is not writable: {e}", dir.display())))?;
        Ok(dir)
    }

    /// Checks the sections `command` needs and that referenced files exist.
    pub fn validate(&self, command: Command) -> Result<()> {
        if let Some(c) = self.command {
            if c != command {
                return Err(QcError::Config(format!(
                    "config is for '{c}' but was run with '{command}'"
                )));
            }
        }
        let missing = |what: &str| QcError::Config(format!("'{command}' needs a '{what}' section"));
        let exists = |p: &Path| {
            let full = self.resolve(p);
            if full.exists() {
                Ok(())
            } else {
                Err(QcError::Config(format!(
                    "referenced file {} does not exist",
                    full.display()
                )))
            }
        };
        match command {
            Command::Transform => {
                let t = self.transform.as_ref().ok_or_else(|| missing("transform"))?;
                if let InputSpec::Field { path } = &t.input {
                    exists(path)?;
                }
                if t.operator == Operator::BeurlingPower && t.power == 0 {
                    return Err(QcError::Config("beurling_power needs power >= 1".into()));
                }
                if t.operator == Operator::Cauchy && t.oracle != OracleKind::None {
                    return Err(QcError::Config("no oracle is available for the cauchy operator".into()));
                }
            }
            Command::Solve => exists(self.problem.as_deref().ok_or_else(|| missing("problem"))?)?,
            Command::Verify => {
                let v = self.verify.as_ref().ok_or_else(|| missing("verify"))?;
                if !RECIPES.contains(&v.recipe.as_str()) {
                    return Err(QcError::Config(format!(
                        "unknown recipe '{}'; known recipes: {}",
                        v.recipe,
                        RECIPES.join(", ")
                    )));
                }
            }
            Command::Sweep => {
                let s = self.sweep.as_ref().ok_or_else(|| missing("sweep"))?;
                if s.grid_sizes.is_empty() {
                    return Err(QcError::Config("sweep.grid_sizes is empty".into()));
                }
                let budget = self.memory_budget_mb as f64 * 1024.0 * 1024.0;
                for &n in &s.grid_sizes {
                    let need = estimated_bytes(n);
                    if need > budget {
                        return Err(QcError::Config(format!(
                            "grid {n}² needs about {:.0} MiB, above memory_budget_mb = {}",
                            need / (1024.0 * 1024.0),
                            self.memory_budget_mb
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Rough peak memory of one sweep level on an `n × n` grid.
pub fn estimated_bytes(n: usize) -> f64 {
    (n * n) as f64 * 16.0 * FIELDS_PER_LEVEL as f64
}

/// Result of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub files: Vec<PathBuf>,
}

pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate(command)?;
    match command {
        Command::Transform => run_transform(cfg),
        Command::Solve => run_solve(cfg),
        Command::Verify => run_verify(cfg).map(|(o, _)| o),
        Command::Sweep => run_sweep(cfg).map(|(o, _)| o),
    }
}

/// 0 when every check passed, 1 on a failed check or numerical failure, 2 on
/// a configuration error.
pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(o) if o.passed => 0,
        Ok(_) => 1,
        Err(e) if is_config_error(e) => 2,
        Err(_) => 1,
    }
}

pub fn is_config_error(e: &QcError) -> bool {
    matches!(
        e,
        QcError::Config(_)
            | QcError::Json(_)
            | QcError::InvalidGrid(_)
            | QcError::InvalidDomain(_)
            | QcError::InvalidArgument(_)
    )
}

/// Builds the global thread pool, capped by [`THREADS_ENV`] when set.
pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| QcError::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
    // a pool built earlier in the process keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn relative_paths_resolve_against_the_config() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "c.json", r#"{"problem": "p.json"}"#);
        let cfg = ExperimentConfig::from_file(&p).unwrap();
        assert_eq!(cfg.resolve(Path::new("p.json")), dir.path().join("p.json"));
        let err = cfg.validate(Command::Solve).unwrap_err();
        assert!(err.to_string().contains("does not exist"), "{err}");
    }

    #[test]
    fn unknown_fields_and_recipes_are_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "c.json", r#"{"seeed": 3}"#);
        let e = ExperimentConfig::from_file(&p).unwrap_err();
        assert!(is_config_error(&e));
        let p = write(dir.path(), "d.json", r#"{"verify": {"recipe": "lemma2"}}"#);
        let e = ExperimentConfig::from_file(&p)
            .unwrap()
            .validate(Command::Verify)
            .unwrap_err();
        assert!(e.to_string().contains("lemma1-disc"), "{e}");
        assert_eq!(exit_code(&Err(e)), 2);
    }

    #[test]
    fn command_mismatch_is_rejected() {
        let cfg = ExperimentConfig {
            command: Some(Command::Sweep),
            ..Default::default()
        };
        assert!(cfg.validate(Command::Verify).is_err());
    }

    #[test]
    fn memory_budget_limits_sweeps() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "s.json",
            r#"{"memory_budget_mb": 64, "sweep": {"quantity": "cancellation", "grid_sizes": [256, 1024],
                "domain": {"shape": "disc", "center": [0, 0], "radius": 1}}}"#,
        );
        let e = ExperimentConfig::from_file(&p)
            .unwrap()
            .validate(Command::Sweep)
            .unwrap_err();
        assert!(e.to_string().contains("1024"), "{e}");
    }

    #[test]
    fn overrides_replace_config_values() {
        let cfg = ExperimentConfig::default().with_overrides(Some("x".into()), Some(9), Some(128));
        assert_eq!((cfg.seed, cfg.grid.n), (9, Some(128)));
        assert_eq!(cfg.grid.build().unwrap().n(), 128);
        assert_eq!(cfg.grid.build().unwrap().half_width(), 4.0);
    }
}
