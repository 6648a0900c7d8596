use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sparse_trig::harness::{self, Bundle, ExperimentConfig, Status};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Sparse trigonometric approximation experiments.
///
/// Exit status: 0 when every asserted check passed, 2 when a monitored
/// metric was breached, 1 on failure or error.
#[derive(Parser)]
#[command(name = "sparse-trig", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Greedy and layered approximation runs.
    Approx(RunArgs),
    /// Rate experiments of any kind; `--all` runs every bundled preset.
    Rates {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, conflicts_with_all = ["config", "preset"])]
        all: bool,
    },
    /// Sparse-grid cubature experiments.
    Cubature(RunArgs),
    /// Exhaustive best m-term oracle and Lebesgue-type checks.
    Oracle(RunArgs),
    /// Rerun a stored manifest and compare output digests.
    Replay {
        manifest: PathBuf,
        /// Defaults to `replay/` next to the manifest.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// List the bundled presets.
    List {
        /// Print full configurations as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration file (JSON).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Name of a bundled preset.
    #[arg(long)]
    preset: Option<String>,
    /// Replace the seed list with this single seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut config = match (&self.config, &self.preset) {
            (Some(path), _) => {
                ExperimentConfig::load(path).with_context(|| format!("reading config {}", path.display()))?
            }
            (None, Some(name)) => harness::preset(name)?,
            (None, None) => bail!("pass --config <path> or --preset <name>"),
        };
        if let Some(seed) = self.seed {
            config.seeds = vec![seed];
        }
        Ok(config)
    }
}

fn report(bundle: &Bundle) {
    let s = &bundle.outcome.summary;
    let slope = match (&s.fit, s.expected_slope) {
        (Some(f), Some(e)) => format!(", slope {:.4} (expected {e:.4}, loo {:.4}..{:.4})", f.slope, f.band[0], f.band[1]),
        (Some(f), None) => format!(", slope {:.4}", f.slope),
        _ => String::new(),
    };
    println!("{}: {:?}, {} rows{slope}", s.id, s.status, s.rows);
    for c in &s.checks {
        let mark = if c.passed { "ok" } else { "BREACH" };
        println!("  [{mark}] {} ({:?}): {}", c.name, c.kind, c.detail);
    }
    for w in &s.warnings {
        eprintln!("  warning: {w}");
    }
    println!("  wrote {}", bundle.dir.display());
}

fn run_one(config: &ExperimentConfig, out_dir: Option<&Path>, kinds: &[&str]) -> Result<Status> {
    let kind = config.experiment.kind();
    if !kinds.is_empty() && !kinds.contains(&kind) {
        bail!("config {} has kind {kind}; this command runs {}", config.id, kinds.join(", "));
    }
    let dir = harness::resolve_out_dir(config, out_dir)?;
    let bundle = harness::run(config, &dir)?;
    report(&bundle);
    Ok(bundle.outcome.summary.status)
}

fn dispatch(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Approx(a) => run_one(&a.load()?, a.out_dir.as_deref(), &["ia_rate", "layered"]),
        Command::Cubature(a) => run_one(&a.load()?, a.out_dir.as_deref(), &["cubature"]),
        Command::Oracle(a) => run_one(&a.load()?, a.out_dir.as_deref(), &["oracle", "lebesgue"]),
        Command::Rates { run, all: false } => run_one(&run.load()?, run.out_dir.as_deref(), &[]),
        Command::Rates { run, all: true } => {
            let root = run.out_dir.context("--all needs --out-dir")?;
            let mut status = Status::Pass;
            for mut config in harness::presets() {
                if let Some(seed) = run.seed {
                    config.seeds = vec![seed];
                }
                status = status.max(run_one(&config, Some(&root.join(&config.id)), &[])?);
            }
            Ok(status)
        }
        Command::Replay { manifest, out_dir } => {
            let dir = out_dir.unwrap_or_else(|| manifest.parent().unwrap_or(Path::new(".")).join("replay"));
            let rep = harness::replay(&manifest, &dir)?;
            report(&rep.bundle);
            if rep.identical() {
                println!("  replay identical to {}", manifest.display());
                Ok(rep.bundle.outcome.summary.status)
            } else {
                println!("  replay differs in {}", rep.mismatched.join(", "));
                Ok(Status::Fail)
            }
        }
        Command::List { json } => {
            let mut out = std::io::stdout().lock();
            for c in harness::presets() {
                let line = if json {
                    serde_json::to_string(&c)?
                } else {
                    format!("{:<22} {:<9} {}", c.id, c.experiment.kind(), c.claim)
                };
                // A closed pipe (`| head`) just ends the listing.
                if writeln!(out, "{line}").is_err() {
                    break;
                }
            }
            Ok(Status::Pass)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(status) => ExitCode::from(status.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
