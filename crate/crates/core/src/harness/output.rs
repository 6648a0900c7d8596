use super::config::ExperimentConfig;
use super::run::{execute, Outcome, Row};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const RESULTS_CSV: &str = "results.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const MANIFEST_JSON: &str = "manifest.json";

/// Everything needed to rerun an experiment and compare outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub crate_version: String,
    pub parallel: bool,
    /// SHA-256 of each written file except the manifest.
    pub sha256: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct Bundle {
    pub outcome: Outcome,
    pub dir: PathBuf,
    pub manifest: Manifest,
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn rows_to_csv(rows: &[Row]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record([
            "experiment", "regime", "d", "r", "q", "p", "theta", "mu", "n", "seed", "m", "error", "predicted", "ratio",
            "fit_slope",
        ])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn rows_from_csv(bytes: &[u8]) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_reader(bytes);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Runs `config` and writes `results.csv`, `summary.json` and
/// `manifest.json` into `dir`.
pub fn run(config: &ExperimentConfig, dir: &Path) -> Result<Bundle> {
    let outcome = execute(config)?;
    std::fs::create_dir_all(dir)?;
    let csv = rows_to_csv(&outcome.rows)?;
    let summary = serde_json::to_vec_pretty(&outcome.summary)?;
    std::fs::write(dir.join(RESULTS_CSV), &csv)?;
    std::fs::write(dir.join(SUMMARY_JSON), &summary)?;
    let manifest = Manifest {
        config: config.clone(),
        crate_version: env!("CARGO_PKG_VERSION").into(),
        parallel: crate::par::is_parallel(),
        sha256: BTreeMap::from([
            (RESULTS_CSV.to_string(), hex_digest(&csv)),
            (SUMMARY_JSON.to_string(), hex_digest(&summary)),
        ]),
    };
    std::fs::write(dir.join(MANIFEST_JSON), serde_json::to_vec_pretty(&manifest)?)?;
    Ok(Bundle {
        outcome,
        dir: dir.to_path_buf(),
        manifest,
    })
}

/// Output directory: the explicit one, else the config's, else an error.
pub fn resolve_out_dir(config: &ExperimentConfig, explicit: Option<&Path>) -> Result<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| config.out_dir.as_ref().map(PathBuf::from))
        .ok_or_else(|| Error::InvalidParameter("no output directory given".into()))
}

#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub bundle: Bundle,
    /// Files whose digest differs from the stored manifest.
    pub mismatched: Vec<String>,
}

impl ReplayReport {
    pub fn identical(&self) -> bool {
        self.mismatched.is_empty()
    }
}

/// Reruns the config stored in a manifest into `dir` and compares digests.
pub fn replay(manifest_path: &Path, dir: &Path) -> Result<ReplayReport> {
    let stored: Manifest = serde_json::from_str(&std::fs::read_to_string(manifest_path)?)?;
    let bundle = run(&stored.config, dir)?;
    let mismatched = stored
        .sha256
        .iter()
        .filter(|(name, digest)| bundle.manifest.sha256.get(*name) != Some(*digest))
        .map(|(name, _)| name.clone())
        .collect();
    Ok(ReplayReport { bundle, mismatched })
}
