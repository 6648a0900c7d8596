//! Drives the built binary and checks exit codes and written files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sparse-trig"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sparse-trig-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn list_prints_every_preset() {
    let out = run(&["list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 15);
    assert!(text.contains("cubature-sparse-grid"));

    let out = run(&["list", "--json"]);
    for line in String::from_utf8(out.stdout).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["experiment"]["kind"].is_string());
    }
}

#[test]
fn oracle_run_then_replay() {
    let dir = scratch("oracle");
    let out = run(&["oracle", "--preset", "oracle-dominance", "--seed", "3", "--out-dir", path(&dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["results.csv", "summary.json", "manifest.json"] {
        assert!(dir.join(f).is_file(), "{f}");
    }
    let out = run(&["replay", path(&dir.join("manifest.json"))]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout).unwrap().contains("replay identical"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn wrong_kind_and_missing_out_dir_are_errors() {
    let out = run(&["cubature", "--preset", "oracle-dominance", "--out-dir", "/nonexistent"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8(out.stderr).unwrap().contains("has kind oracle"));

    let out = run(&["oracle", "--preset", "oracle-dominance"]);
    assert_eq!(code(&out), 1);

    let out = run(&["rates", "--all"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn guard_violation_is_an_error() {
    let dir = scratch("guard");
    let list = run(&["list", "--json"]);
    let text = String::from_utf8(list.stdout).unwrap();
    let mut config: serde_json::Value = text
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .find(|v| v["id"] == "layered-w-l2")
        .unwrap();
    config["experiment"]["mu"] = serde_json::json!(1.5);
    let file = dir.join("bad.json");
    std::fs::write(&file, config.to_string()).unwrap();
    let out = run(&["approx", "--config", path(&file), "--out-dir", path(&dir.join("out"))]);
    assert_eq!(code(&out), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn monitored_breach_exits_with_warning_code() {
    let dir = scratch("monitor");
    let list = run(&["list", "--json"]);
    let text = String::from_utf8(list.stdout).unwrap();
    let mut config: serde_json::Value = text
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
        .find(|v| v["id"] == "ia-box-lp")
        .unwrap();
    config["experiment"]["bounds"] = serde_json::json!([8]);
    config["experiment"]["m"] = serde_json::json!([4, 8, 16, 32]);
    config["seeds"] = serde_json::json!([1, 2]);
    config["tolerances"]["slope"]["enforce"] = serde_json::json!(false);
    config["tolerances"]["slope"]["lo"] = serde_json::json!(-0.01);
    config["tolerances"]["slope"]["hi"] = serde_json::json!(0.0);
    config["tolerances"]["monitor_max"] = serde_json::json!(1e-9);
    let file = dir.join("tight.json");
    std::fs::write(&file, config.to_string()).unwrap();
    let out = run(&["approx", "--config", path(&file), "--out-dir", path(&dir.join("out"))]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8(out.stdout).unwrap().contains("BREACH"));
    std::fs::remove_dir_all(&dir).unwrap();
}
