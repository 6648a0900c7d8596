use super::*;
use crate::classes::ClassSpec;
use crate::greedy::{GreedyOptions, TrigDictionary};
use crate::layered::Target;
use proptest::prelude::*;

fn rows(f: impl Fn(f64) -> f64) -> Vec<[f64; 2]> {
    [4.0, 8.0, 16.0, 32.0, 64.0, 128.0].iter().map(|&m| [m, f(m)]).collect()
}

#[test]
fn fit_recovers_exact_power() {
    let fit = fit_rate(&rows(|m| 1.0 / m), 0.0).unwrap();
    assert!((fit.slope + 1.0).abs() < 1e-12);
    assert!(fit.residual < 1e-12);
    assert!((fit.band[0] + 1.0).abs() < 1e-12 && (fit.band[1] + 1.0).abs() < 1e-12);
}

#[test]
fn fit_divides_out_the_log_power() {
    let fit = fit_rate(&rows(|m| m.ln().powi(2) / m), 2.0).unwrap();
    assert!((fit.slope + 1.0).abs() < 1e-12);
    let raw = fit_rate(&rows(|m| m.ln().powi(2) / m), 0.0).unwrap();
    assert!(raw.slope > -0.5);
}

#[test]
fn level_fit_reads_dyadic_decay() {
    let pts: Vec<[f64; 2]> = (3..=8).map(|n| [n as f64, 2f64.powf(-1.5 * n as f64) * n as f64]).collect();
    let fit = fit_level(&pts, 1.0).unwrap();
    assert_eq!(fit.axis, FitAxis::Level);
    assert!((fit.slope + 1.5).abs() < 1e-12);
}

#[test]
fn degenerate_fits_are_rejected() {
    assert!(matches!(fit_rate(&rows(|m| 1.0 / m)[..3], 0.0), Err(crate::Error::DegenerateFit(_))));
    let zero = rows(|m| if m == 8.0 { 0.0 } else { 1.0 / m });
    assert!(matches!(fit_rate(&zero, 0.0), Err(crate::Error::DegenerateFit(_))));
    let same: Vec<[f64; 2]> = (0..5).map(|i| [16.0, 1.0 + i as f64]).collect();
    assert!(matches!(fit_rate(&same, 0.0), Err(crate::Error::DegenerateFit(_))));
    assert!(fit_rate(&[[1.0, 1.0], [2.0, 0.5], [4.0, 0.25], [8.0, 0.1]], 1.0).is_err());
}

#[test]
fn leave_one_out_band_brackets_the_slope() {
    let noisy: Vec<[f64; 2]> = rows(|m| 1.0 / m)
        .into_iter()
        .enumerate()
        .map(|(i, [m, e])| [m, e * if i % 2 == 0 { 1.2 } else { 0.9 }])
        .collect();
    let fit = fit_rate(&noisy, 0.0).unwrap();
    assert!(fit.band[0] <= fit.slope && fit.slope <= fit.band[1]);
    assert!(fit.band[1] - fit.band[0] > 0.0);
    assert!(fit.residual > 0.0);
}

#[test]
fn oracle_l2_parseval_tail() {
    let dict = TrigDictionary::for_box(&[3], 2.0).unwrap();
    let f = dict.synthesize(&[1, 3, 5], &[3.0, 2.0, 1.0]);
    let s = oracle_sigma(&f, &dict, 1, &GreedyOptions::default(), 10).unwrap();
    assert!((s - 5f64.sqrt()).abs() < 1e-12);
    assert_eq!(oracle_sigma(&f, &dict, 3, &GreedyOptions::default(), 10).unwrap(), 0.0);
}

#[test]
fn oracle_exhaustive_anchor() {
    // Exhaustive search over the 21 pairs of the 7 atoms; frozen from the
    // first run.
    let dict = TrigDictionary::for_box(&[3], 4.0).unwrap();
    assert_eq!(dict.len(), 7);
    let f = gaussian_target(&dict, 7);
    let s = oracle_sigma(&f, &dict, 2, &GreedyOptions::default(), 100_000).unwrap();
    assert!((s - 0.30496881153766986).abs() < 1e-9, "{s}");
    let full = oracle_sigma(&f, &dict, 7, &GreedyOptions::default(), 100_000).unwrap();
    assert!(full < 1e-9);
}

#[test]
fn presets_validate_and_name_their_guards() {
    let all = presets();
    assert_eq!(all.len(), 15);
    let mut ids: Vec<&str> = all.iter().map(|c| c.id.as_str()).collect();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), all.len());
    for c in &all {
        c.validate().unwrap_or_else(|e| panic!("{}: {e}", c.id));
        assert!(!c.claim.is_empty() && !c.guard.is_empty(), "{}", c.id);
        let back = ExperimentConfig::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(&back, c);
    }
    assert!(preset("no-such-preset").is_err());
}

#[test]
fn guard_violations_are_refused_before_running() {
    let mut c = preset("layered-w-l2").unwrap();
    if let Experiment::Layered { mu, .. } = &mut c.experiment {
        *mu = 1.5;
    }
    assert!(matches!(execute(&c), Err(crate::Error::Guard(_))));

    let mut c = preset("layered-w-l2").unwrap();
    c.experiment = Experiment::Layered {
        target: Target::Class(ClassSpec::W { r: 0.4, q: 2.0, d: 2 }),
        p: 2.0,
        mu: 0.1,
        n: vec![3],
        l_max: 6,
    };
    assert!(matches!(execute(&c), Err(crate::Error::Guard(_))));

    let mut c = preset("oracle-dominance").unwrap();
    c.experiment = Experiment::Oracle {
        bounds: vec![40],
        p: 4.0,
        m: 5,
        weakness: 1.0,
        budget: 100_000,
    };
    assert!(matches!(execute(&c), Err(crate::Error::OracleBudget(_))));

    let mut c = preset("ia-box-lp").unwrap();
    if let Experiment::IaRate { p, .. } = &mut c.experiment {
        *p = 1.5;
    }
    assert!(matches!(execute(&c), Err(crate::Error::Guard(_))));
}

#[test]
fn empty_seed_list_gives_an_empty_table() {
    let mut c = preset("oracle-dominance").unwrap();
    c.seeds.clear();
    let out = execute(&c).unwrap();
    assert!(out.rows.is_empty());
    assert_eq!(out.summary.status, Status::Pass);
    assert_eq!(out.summary.warnings.len(), 1);
    let csv = String::from_utf8(rows_to_csv(&out.rows).unwrap()).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("experiment,regime,"));
}

#[test]
fn exit_codes() {
    assert_eq!(Status::Pass.exit_code(), 0);
    assert_eq!(Status::Warn.exit_code(), 2);
    assert_eq!(Status::Fail.exit_code(), 1);
    assert!(Status::Fail > Status::Warn && Status::Warn > Status::Pass);
}

fn small_ia() -> ExperimentConfig {
    let mut c = preset("ia-a1-l3").unwrap();
    c.experiment = Experiment::IaRate {
        bounds: vec![16],
        p: 4.0,
        m: vec![4, 8, 16, 32],
        target: GreedyTarget::Harmonic,
    };
    c.seeds = vec![1, 2];
    c
}

#[test]
fn breaches_map_to_status() {
    let mut c = small_ia();
    assert_eq!(execute(&c).unwrap().summary.status, Status::Pass);
    c.tolerances.monitor_max = Some(1e-6);
    assert_eq!(execute(&c).unwrap().summary.status, Status::Warn);
    c.tolerances.slope = Some(SlopeBand {
        lo: 5.0,
        hi: 6.0,
        enforce: true,
    });
    let out = execute(&c).unwrap();
    assert_eq!(out.summary.status, Status::Fail);
    assert!(out.summary.checks.iter().any(|k| k.kind == CheckKind::Asserted && !k.passed));
}

#[test]
fn rows_carry_the_fitted_slope() {
    let out = execute(&small_ia()).unwrap();
    let slope = out.summary.fit.as_ref().unwrap().slope;
    assert_eq!(out.rows.len(), 8);
    assert!(out.rows.iter().all(|r| r.fit_slope == Some(slope)));
    assert_eq!(out.summary.seed_slopes.len(), 2);
    let back = rows_from_csv(&rows_to_csv(&out.rows).unwrap()).unwrap();
    assert_eq!(back, out.rows);
}

#[test]
fn run_writes_bundle_and_replay_matches() {
    let dir = std::env::temp_dir().join(format!("sparse-trig-harness-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let c = small_ia();
    assert!(resolve_out_dir(&c, None).is_err());
    let b = run(&c, &dir).unwrap();
    for f in [RESULTS_CSV, SUMMARY_JSON, MANIFEST_JSON] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let rep = replay(&dir.join(MANIFEST_JSON), &dir.join("again")).unwrap();
    assert!(rep.identical(), "{:?}", rep.mismatched);
    assert_eq!(
        std::fs::read(dir.join(RESULTS_CSV)).unwrap(),
        std::fs::read(dir.join("again").join(RESULTS_CSV)).unwrap()
    );
    assert_eq!(b.manifest.config, c);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn seed_order_does_not_change_rows() {
    let mut c = preset("oracle-dominance").unwrap();
    c.seeds = vec![3, 1, 2];
    let a = execute(&c).unwrap();
    let b = execute(&c).unwrap();
    assert_eq!(rows_to_csv(&a.rows).unwrap(), rows_to_csv(&b.rows).unwrap());
}

#[test]
fn oracle_dominates_algorithms() {
    let c = preset("oracle-dominance").unwrap();
    let out = execute(&c).unwrap();
    assert_eq!(out.summary.status, Status::Pass);
    for chunk in out.rows.chunks(3) {
        let sigma = chunk[0].error;
        assert!(chunk[1].error >= sigma - 1e-9 && chunk[2].error >= sigma - 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fit_is_exact_on_power_laws(rho in -3.0f64..0.5, kappa in 0.0f64..3.0, c in 0.01f64..100.0) {
        let pts = rows(|m| c * m.powf(rho) * m.ln().powf(kappa));
        let fit = fit_rate(&pts, kappa).unwrap();
        prop_assert!((fit.slope - rho).abs() < 1e-9);
        prop_assert!((fit.intercept - c.ln()).abs() < 1e-8);
    }

    #[test]
    fn band_contains_slope(noise in proptest::collection::vec(0.5f64..2.0, 6)) {
        let pts: Vec<[f64; 2]> = rows(|m| 1.0 / m).into_iter().zip(&noise).map(|([m, e], z)| [m, e * z]).collect();
        let fit = fit_rate(&pts, 0.0).unwrap();
        prop_assert!(fit.band[0] <= fit.slope + 1e-12 && fit.slope <= fit.band[1] + 1e-12);
    }
}
