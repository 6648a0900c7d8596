//! End-to-end: config to CSV, summary and manifest, then replay.

use sparse_trig::harness::{self, preset, rows_from_csv, Experiment, MANIFEST_JSON, RESULTS_CSV, SUMMARY_JSON};
use std::path::PathBuf;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sparse-trig-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn layered_run_writes_slopes_and_replays_identically() {
    let mut config = preset("layered-w-l2").unwrap();
    if let Experiment::Layered { n, l_max, .. } = &mut config.experiment {
        *n = vec![3, 4, 5, 6];
        *l_max = 10;
    }
    config.seeds = vec![1];
    let dir = scratch("pipeline");
    let bundle = harness::run(&config, &dir).unwrap();

    let csv = std::fs::read(dir.join(RESULTS_CSV)).unwrap();
    let rows = rows_from_csv(&csv).unwrap();
    assert_eq!(rows.len(), 4);
    let slope = bundle.outcome.summary.fit.as_ref().unwrap().slope;
    assert!(rows.iter().all(|r| r.fit_slope == Some(slope)));
    assert!(rows.iter().all(|r| r.error > 0.0 && r.m > 0));
    let header = String::from_utf8(csv).unwrap();
    assert!(header.lines().next().unwrap().contains("fit_slope"));

    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join(SUMMARY_JSON)).unwrap()).unwrap();
    assert_eq!(summary["id"], "layered-w-l2");

    let rep = harness::replay(&dir.join(MANIFEST_JSON), &dir.join("replay")).unwrap();
    assert!(rep.identical(), "{:?}", rep.mismatched);
    assert_eq!(
        std::fs::read(dir.join(RESULTS_CSV)).unwrap(),
        std::fs::read(dir.join("replay").join(RESULTS_CSV)).unwrap()
    );
    std::fs::remove_dir_all(&dir).unwrap();
}
