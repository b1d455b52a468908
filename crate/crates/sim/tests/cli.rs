//! End-to-end checks of the `airprox` binary: exit codes, emitted files,
//! and byte-level determinism of the sweep outputs.

use std::path::Path;
use std::process::Command;

fn airprox() -> Command {
    Command::new(env!("CARGO_BIN_EXE_airprox"))
}

fn tiny_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("experiment.toml");
    std::fs::write(
        &path,
        r#"
master_seed = 7
trials = 3
t_max = 15.0

[[configuration]]
id = 11
team_size = 2

[[configuration]]
id = 9
team_size = 2
"#,
    )
    .unwrap();
    path
}

#[test]
fn run_emits_diagnostics_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_config(dir.path());
    let out = dir.path().join("out");
    let status = airprox()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--config-id", "11", "--seed", "5", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let diag = std::fs::read_to_string(out.join("trial.jsonl")).unwrap();
    let mut kinds = std::collections::HashSet::new();
    for line in diag.lines() {
        let value: serde_json::Value = serde_json::from_str(line).expect("valid JSONL");
        kinds.insert(value["kind"].as_str().unwrap().to_string());
    }
    assert!(kinds.contains("state"));
    assert!(kinds.contains("link"));
    assert!(kinds.contains("result"));
}

#[test]
fn sweep_outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_config(dir.path());
    for out in ["a", "b"] {
        let status = airprox()
            .args(["sweep", "--config"])
            .arg(&config)
            .args(["--out"])
            .arg(dir.path().join(out))
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in ["sweep.csv", "sweep_long.csv", "trials.jsonl"] {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn sweep_respects_no_avoidance_flag() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_config(dir.path());
    let out = dir.path().join("out");
    let status = airprox()
        .args(["sweep", "--config"])
        .arg(&config)
        .args(["--no-avoidance", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    for line in csv.lines().skip(1) {
        assert!(line.contains(",false,"), "expected only baseline rows: {line}");
    }
}

#[test]
fn invalid_config_fails_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    // Density >= 1 must be rejected.
    std::fs::write(
        &path,
        "[[configuration]]\nid = 1\narena_side = 1.0\nmav_radius = 0.45\nteam_size = 3\n",
    )
    .unwrap();
    let output = airprox()
        .args(["sweep", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("density"), "stderr: {stderr}");

    // Unknown keys are schema violations.
    std::fs::write(&path, "masterseed = 3\n").unwrap();
    let output = airprox()
        .args(["sweep", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(!output.status.success());
}

#[test]
fn scenario_circle_emits_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = airprox()
        .args(["scenario", "circle", "--trials", "3", "--seed", "2", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("circle.csv").exists());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("circle_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["realizations"], 3);
}

#[test]
fn ablation_requires_ablation_configs() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_config(dir.path()); // ids 11 and 9; 9 is in the set
    let out = dir.path().join("out");
    let status = airprox()
        .args(["ablation", "--config"])
        .arg(&config)
        .args(["--trials", "2", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("ablation.csv")).unwrap();
    // Only configuration 9 qualifies; three variants.
    assert_eq!(csv.lines().count(), 1 + 3);

    let only_11 = dir.path().join("only11.toml");
    std::fs::write(&only_11, "[[configuration]]\nid = 11\n").unwrap();
    let status = airprox()
        .args(["ablation", "--config"])
        .arg(&only_11)
        .args(["--out"])
        .arg(dir.path().join("out2"))
        .status()
        .unwrap();
    assert!(!status.success());
}
