//! End-to-end checks of the command-line interface: exit codes, artifact
//! layout, and byte-for-byte determinism of reruns with identical
//! manifests.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_homflow"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("homflow-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn check_nr_on_aloff_wallach() {
    let out = tmp("aw-nr.json");
    let status = bin()
        .args([
            "space",
            "check-nr",
            "--preset",
            "aloff-wallach",
            "--p",
            "1",
            "--q",
            "1",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["verdicts"]["nr"], serde_json::json!(true));
    assert!(out.with_extension("json.manifest.json").exists());
}

#[test]
fn unknown_preset_is_a_config_error() {
    let status = bin()
        .args(["space", "constants", "--preset", "no-such-space", "--out"])
        .arg(tmp("nothing.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn missing_spec_file_is_a_config_error() {
    let status = bin()
        .args(["space", "constants", "--spec", "/nonexistent/spec.json", "--out"])
        .arg(tmp("nothing2.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn flow_run_zero_span_is_ok_and_deterministic() {
    let out1 = tmp("traj1.csv");
    let out2 = tmp("traj2.csv");
    for out in [&out1, &out2] {
        let status = bin()
            .args([
                "flow",
                "run",
                "--preset",
                "aloff-wallach-11",
                "--direction",
                "backward",
                "--normalization",
                "none",
                "--t-end",
                "0",
                "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b);
    // one header plus exactly one row at tau = 0
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().next().unwrap().starts_with("tau,x_1"));
}

#[test]
fn einstein_solve_flag_su3_finds_four() {
    let out = tmp("einstein.json");
    let status = bin()
        .args([
            "einstein",
            "solve",
            "--preset",
            "flag-su3",
            "--starts",
            "64",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
}

#[test]
fn flow_runs_are_byte_identical_across_reruns() {
    // identical manifests (same arguments, same output path) must
    // reproduce identical bytes
    let out = tmp("det.csv");
    let run = || {
        let status = bin()
            .args([
                "flow",
                "run",
                "--preset",
                "sp2-sp1",
                "--direction",
                "backward",
                "--t-end",
                "3.0",
                "--torus",
                "0",
                "--seed",
                "5",
                "--out",
            ])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        (
            std::fs::read(&out).unwrap(),
            std::fs::read(out.with_extension("csv.manifest.json")).unwrap(),
        )
    };
    let (csv1, man1) = run();
    let (csv2, man2) = run();
    assert_eq!(csv1, csv2);
    assert_eq!(man1, man2);
}

#[test]
fn ancient_and_analyze_pipeline() {
    let traj = tmp("ancient.csv");
    let status = bin()
        .args([
            "ancient",
            "construct",
            "--preset",
            "aloff-wallach-11",
            "--torus",
            "0",
            "--eta",
            "1e-6",
            "--tau-max",
            "200",
            "--out",
        ])
        .arg(&traj)
        .status()
        .unwrap();
    assert!(status.success());
    let report = tmp("report.json");
    let status = bin()
        .args([
            "analyze",
            "report",
            "--preset",
            "aloff-wallach-11",
            "--torus",
            "0",
            "--traj",
        ])
        .arg(&traj)
        .arg("--out")
        .arg(&report)
        .status()
        .unwrap();
    assert!(status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["termination"], serde_json::json!("span_end"));
    assert!(v["type_one_band"].is_array());
}

#[test]
fn custom_spec_file_builds() {
    let spec = tmp("flag.json");
    std::fs::write(
        &spec,
        r#"{"family":"su","n":3,"h":{"torus":[[1,-1,0],[0,1,-1]],"roots":[]}}"#,
    )
    .unwrap();
    let out = tmp("flag-report.json");
    let status = bin()
        .args(["space", "constants", "--spec"])
        .arg(&spec)
        .args(["--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["dim_m"], serde_json::json!(6));
}
