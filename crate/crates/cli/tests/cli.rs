//! End-to-end tests of the `gtp` binary: exit codes, output files,
//! seeding precedence, and the word input plumbing.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn gtp(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gtp"));
    cmd.args(args);
    cmd.env_remove("GTP_SEED");
    cmd
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn write_kernel(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("kernel.txt");
    fs::write(&path, "1 2\n0.7 0.3\n0.2 0.8\n").unwrap();
    path
}

fn write_config(dir: &Path, kernel: &Path, seed: Option<u64>) -> std::path::PathBuf {
    let path = dir.join("exp.json");
    let seed_line = seed.map_or(String::new(), |s| format!("\"seed\": {s},"));
    fs::write(
        &path,
        format!(
            r#"{{
  "alphabet": 2,
  "horizon": 200,
  {seed_line}
  "forecaster": {{ "kind": "markov", "kernel_file": {kernel:?} }},
  "skeptic": {{ "kind": "lz" }},
  "reality": {{ "kind": "markov", "kernel_file": {kernel:?} }},
  "trajectory_csv": {traj:?},
  "summary_json": {summary:?}
}}"#,
            kernel = kernel,
            traj = dir.join("traj.csv"),
            summary = dir.join("summary.json"),
        ),
    )
    .unwrap();
    path
}

#[test]
fn simulate_writes_outputs_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let kernel = write_kernel(dir.path());
    let config = write_config(dir.path(), &kernel, Some(11));

    let out = gtp(&["simulate", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["horizon"], 200);
    assert_eq!(summary["seed"], 11);
    assert!(summary["entropy_rate"].is_f64());

    let csv = fs::read_to_string(dir.path().join("traj.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "step,outcome,forecast_1,forecast_2,q_1,q_2,log_capital,banked"
    );
    assert_eq!(lines.count(), 200);

    let on_disk: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(on_disk, summary);

    // same seed, same trajectory
    let rerun = gtp(&["simulate", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(rerun.status.success());
    assert_eq!(fs::read_to_string(dir.path().join("traj.csv")).unwrap(), csv);

    // a different seed moves the capital
    let other = gtp(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "12",
    ])
    .output()
    .unwrap();
    assert!(other.status.success());
    let other: serde_json::Value = serde_json::from_str(&stdout(&other)).unwrap();
    assert_eq!(other["seed"], 12);
    assert_ne!(other["final_log_capital"], summary["final_log_capital"]);
}

#[test]
fn seed_precedence_flag_config_env() {
    let dir = TempDir::new().unwrap();
    let kernel = write_kernel(dir.path());

    // no flag, no config seed: the environment variable wins
    let config = write_config(dir.path(), &kernel, None);
    let out = gtp(&["simulate", "--config", config.to_str().unwrap()])
        .env("GTP_SEED", "42")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["seed"], 42);

    // config seed beats the environment
    let config = write_config(dir.path(), &kernel, Some(7));
    let out = gtp(&["simulate", "--config", config.to_str().unwrap()])
        .env("GTP_SEED", "42")
        .output()
        .unwrap();
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["seed"], 7);

    // the flag beats everything
    let out = gtp(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "3",
    ])
    .env("GTP_SEED", "42")
    .output()
    .unwrap();
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["seed"], 3);

    // nothing set at all: seed 0
    let config = write_config(dir.path(), &kernel, None);
    let out = gtp(&["simulate", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["seed"], 0);
}

#[test]
fn horizon_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let kernel = write_kernel(dir.path());
    let config = write_config(dir.path(), &kernel, Some(1));
    let out = gtp(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--horizon",
        "50",
    ])
    .output()
    .unwrap();
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["horizon"], 50);
}

#[test]
fn parse_from_argument_and_file_agree() {
    let dir = TempDir::new().unwrap();
    let word_file = dir.path().join("word.txt");
    fs::write(&word_file, "1000011101011\n").unwrap();

    let from_arg = gtp(&["parse", "1000011101011"]).output().unwrap();
    assert!(from_arg.status.success());
    let from_file = gtp(&["parse", "--file", word_file.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(from_file.status.success());
    assert_eq!(stdout(&from_arg), stdout(&from_file));

    let text = stdout(&from_arg);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "/1/0/00/01/11/010/11");
    assert_eq!(lines.next().unwrap(), "c = 6");
    assert_eq!(lines.next().unwrap(), "|V| = 8");
}

#[test]
fn parse_echoes_one_based_digits() {
    // no 0 digit in the input, so it is read and echoed 1-based
    let out = gtp(&["parse", "211121"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().next().unwrap(), "/2/1/11/21");
}

#[test]
fn analyze_reports_decomposition_with_kernel() {
    let dir = TempDir::new().unwrap();
    let kernel = write_kernel(dir.path());
    let out = gtp(&[
        "analyze",
        "100001110101101001",
        "--kernel",
        kernel.to_str().unwrap(),
        "--context-len",
        "2",
    ])
    .output()
    .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["c"].is_u64());
    assert!(report["delta_bound"].is_f64());
    let d = &report["decomposition"];
    let gap = d["total"].as_f64().unwrap()
        - d["boundary_term"].as_f64().unwrap()
        - d["weighted_kl"].as_f64().unwrap();
    assert!(gap.abs() < 1e-9);
}

#[test]
fn verify_reports_and_exit_codes() {
    let out = gtp(&["verify", "martingale", "--max-len", "5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    assert_eq!(report["suite"], "martingale");
    assert_eq!(report["passed"], true);

    let bad = gtp(&["verify", "no-such-suite"]).output().unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unknown suite"));
}

#[test]
fn malformed_config_fails_cleanly() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("broken.json");
    fs::write(&config, "{ not json").unwrap();
    let out = gtp(&["simulate", "--config", config.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
