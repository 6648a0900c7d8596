//! Experiment configuration, seeded runs and replay, rate fitting, and
//! CSV/JSON output.
//!
//! A run validates its [`ExperimentConfig`] against the regime guards,
//! dispatches to the approximation, greedy or cubature code, and reports
//! asserted checks (failures) and monitored metrics (warnings) in a
//! [`Summary`]. Rows are sorted before writing, so identical configs give
//! identical CSV bytes on one platform.

mod config;
mod fit;
mod output;
mod run;

pub use crate::greedy::oracle_sigma;
pub use config::{preset, presets, Experiment, ExperimentConfig, GreedyTarget, SlopeBand, Tolerances};
pub use fit::{fit_level, fit_rate, FitAxis, RateFit};
pub use output::{
    replay, resolve_out_dir, rows_from_csv, rows_to_csv, run, Bundle, Manifest, ReplayReport, MANIFEST_JSON,
    RESULTS_CSV, SUMMARY_JSON,
};
pub use run::{execute, gaussian_target, Check, CheckKind, Outcome, Row, SeedSlope, Status, Summary};

#[cfg(test)]
mod tests;
