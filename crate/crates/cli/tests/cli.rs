//! End-to-end checks of the `recov` binary: exit codes, JSON/CSV outputs,
//! and validation errors for malformed inputs.

use std::path::PathBuf;
use std::process::{Command, Output};

use recoverability::io::{write_json, ChannelJson, MatrixJson};
use recoverability::numerics::{re, CMat};
use recoverability::quantum::QuantumMap;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_recov"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("recov-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_worked_example(dir: &PathBuf) -> (PathBuf, PathBuf, PathBuf) {
    let rho = CMat::from_row_slice(2, 2, &[re(0.5), re(0.4), re(0.4), re(0.5)]);
    let sigma = CMat::from_row_slice(2, 2, &[re(0.5), re(0.0), re(0.0), re(0.5)]);
    let k0 = CMat::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(0.0)]);
    let k1 = CMat::from_row_slice(2, 2, &[re(0.0), re(0.0), re(0.0), re(1.0)]);
    let channel = QuantumMap::from_kraus(vec![k0, k1]).unwrap();

    let rho_path = dir.join("rho.json");
    let sigma_path = dir.join("sigma.json");
    let channel_path = dir.join("channel.json");
    write_json(&rho_path, &MatrixJson::from_mat(&rho)).unwrap();
    write_json(&sigma_path, &MatrixJson::from_mat(&sigma)).unwrap();
    write_json(&channel_path, &ChannelJson::from_map(&channel)).unwrap();
    (rho_path, sigma_path, channel_path)
}

#[test]
fn check_reports_the_dephasing_example() {
    let dir = scratch("worked");
    let (rho, sigma, channel) = write_worked_example(&dir);
    let out = bin()
        .args(["check", "--rho"])
        .arg(&rho)
        .arg("--sigma")
        .arg(&sigma)
        .arg("--channel")
        .arg(&channel)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let delta = report["delta"].as_f64().unwrap();
    let bound = report["bound"].as_f64().unwrap();
    assert!((delta - 0.368064207168497).abs() <= 1e-9);
    assert!((bound - 0.223143551314210).abs() <= 1e-9);
    assert_eq!(report["verdict"], "pass");
    let summary = String::from_utf8_lossy(&out.stderr);
    assert!(summary.contains("verdict pass"), "summary: {summary}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn check_rejects_a_subnormalized_state() {
    let dir = scratch("badtrace");
    let (_, sigma, channel) = write_worked_example(&dir);
    let bad = CMat::from_row_slice(2, 2, &[re(0.45), re(0.0), re(0.0), re(0.45)]);
    let bad_path = dir.join("bad_rho.json");
    write_json(&bad_path, &MatrixJson::from_mat(&bad)).unwrap();

    let out = bin()
        .args(["check", "--rho"])
        .arg(&bad_path)
        .arg("--sigma")
        .arg(&sigma)
        .arg("--channel")
        .arg(&channel)
        .output()
        .unwrap();
    assert_eq!(code(&out), 64);
    let msg = String::from_utf8_lossy(&out.stderr).to_lowercase();
    assert!(msg.contains("trace"), "error did not name the invariant: {msg}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn run_requires_a_case_list() {
    let dir = scratch("nocase");
    let out = bin().args(["run", "--out"]).arg(&dir).output().unwrap();
    assert_eq!(code(&out), 64);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn run_writes_reports_and_reruns_check_identically() {
    let dir = scratch("campaign");
    let out = bin()
        .args(["run", "--case", "ssa", "--trials", "2", "--seed", "1", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(dir.join("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "case,trial,seed,dims,delta,bound,witness_t,deficit,verdict"
    );
    assert_eq!(lines.clone().count(), 2);
    assert!(lines.all(|l| l.ends_with(",pass")), "csv: {csv}");

    // re-checking the persisted instance reproduces the verdict
    let trial: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("ssa_0000.json")).unwrap())
            .unwrap();
    let inst_path = dir.join("replay_instance.json");
    std::fs::write(&inst_path, serde_json::to_string(&trial["instance"]).unwrap()).unwrap();
    let replay = bin()
        .args(["check", "--instance"])
        .arg(&inst_path)
        .output()
        .unwrap();
    assert_eq!(code(&replay), 0, "stderr: {}", String::from_utf8_lossy(&replay.stderr));
    let report: serde_json::Value = serde_json::from_slice(&replay.stdout).unwrap();
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["delta"], trial["delta"]);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn limits_emits_a_table_and_rejects_sequential() {
    let dir = scratch("limits");
    let out = bin()
        .args(["limits", "--case", "qec", "--trials", "2", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("limits.csv")).unwrap();
    assert!(csv.starts_with("case,trial,alpha,delta_tilde,delta,extrapolated\n"));
    // default grid has 9 alphas; 2 trials
    assert_eq!(csv.lines().count(), 1 + 9 * 2);

    let bad = bin()
        .args(["limits", "--case", "sequential", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&bad), 64);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn functoriality_smoke() {
    let out = bin()
        .args(["functoriality", "--trials", "5"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    for kind in ["normalization", "parallel", "serial"] {
        assert!(text.contains(&format!("{kind}: 5/5 pass")), "stdout: {text}");
    }
}

#[test]
fn unknown_case_is_a_usage_error() {
    let out = bin().args(["run", "--case", "nonsense"]).output().unwrap();
    assert_eq!(code(&out), 64);
}
