use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{LevelFilter, Log, Metadata, Record};

use qclab::experiment::{exit_code, init_threads, is_config_error, run, Command, ExperimentConfig, THREADS_ENV};

#[derive(Parser)]
#[command(name = "qclab", version, about = "Batch experiments for planar quasiconformal maps")]
#[command(after_help = "Exit status: 0 all checks pass, 1 check failure, 2 config error.\n\
Set QCLAB_THREADS to cap worker threads and QCLAB_LOG (error|warn|info|debug) for log detail.")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Finest grid size; overrides the config.
    #[arg(long)]
    grid_n: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply B, Bⁿ or C to a field and compare with an oracle.
    Transform(Common),
    /// Solve a Beltrami problem by the Neumann series.
    Solve(Common),
    /// Run a verification recipe.
    Verify(Common),
    /// Measure a regularity quantity under grid refinement.
    Sweep(Common),
}

struct StderrLogger;

impl Log for StderrLogger {
    fn enabled(&self, m: &Metadata) -> bool {
        m.level() <= log::max_level()
    }

    fn log(&self, r: &Record) {
        if self.enabled(r.metadata()) {
            eprintln!("[{}] {}", r.level().as_str().to_lowercase(), r.args());
        }
    }

    fn flush(&self) {}
}

static LOGGER: StderrLogger = StderrLogger;

fn main() -> ExitCode {
    let level = std::env::var("QCLAB_LOG")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(LevelFilter::Info);
    let _ = log::set_logger(&LOGGER).map(|()| log::set_max_level(level));

    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Transform(a) => (Command::Transform, a),
        Cmd::Solve(a) => (Command::Solve, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    if let Err(e) = init_threads() {
        log::error!("{e} (from {THREADS_ENV})");
        return ExitCode::from(2);
    }
    let result = ExperimentConfig::from_file(&args.config)
        .map(|cfg| cfg.with_overrides(args.out, args.seed, args.grid_n))
        .and_then(|cfg| run(command, &cfg));
    match &result {
        Ok(o) => {
            for f in &o.files {
                log::info!("wrote {}", f.display());
            }
            if !o.passed {
                log::error!("{command}: checks failed");
            }
        }
        Err(e) if is_config_error(e) => log::error!("configuration: {e}"),
        Err(e) => log::error!("{command} failed: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
