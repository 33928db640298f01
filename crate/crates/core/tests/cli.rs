use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pme::statefile::read_state_file;
use pme::verify_pme;
use serde_json::Value;

fn pme(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pme"))
        .args(args)
        .output()
        .expect("run pme")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn golden(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
        .to_str()
        .unwrap()
        .to_owned()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&pme(&["--help"])), 0);
    assert_eq!(code(&pme(&["--version"])), 0);
    assert_eq!(code(&pme(&["protocol", "qss", "--help"])), 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&pme(&[])), 2);
    assert_eq!(code(&pme(&["verify"])), 2);
    assert_eq!(code(&pme(&["verify", &golden("dimer22.state"), "--mode", "all"])), 2);
    assert_eq!(code(&pme(&["frobnicate"])), 2);
}

#[test]
fn construct_writes_loadable_pme_states() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, extra) in [
        ("ghz", vec!["--n", "4", "--d", "3"]),
        ("bell-dimer", vec!["--n", "3", "--d", "2"]),
        ("family-a", vec!["--theta", "-0.3", "--seed", "1"]),
        ("family-b", vec!["--phi", "0.2", "--alpha", "0.4"]),
        ("psi-zero", vec!["--beta", "1.0"]),
        ("circuit-psi", vec!["--n", "3", "--d", "2", "--seed", "9"]),
        ("circuit-xi", vec!["--n", "3", "--d", "2", "--seed", "9"]),
    ] {
        let path = dir.path().join(format!("{kind}.state"));
        let mut args = vec!["construct", kind, "--out", path.to_str().unwrap()];
        args.extend(extra);
        let out = pme(&args);
        assert_eq!(code(&out), 0, "{kind}: {}", String::from_utf8_lossy(&out.stderr));
        let s = read_state_file(&path).unwrap();
        if kind != "ghz" {
            assert!(verify_pme(&s, 1e-10).unwrap().overall_pass, "{kind}");
        }
    }
}

#[test]
fn construct_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    for (name, seed) in [("a", "3"), ("b", "3"), ("c", "4")] {
        let out = pme(&["construct", "circuit-xi", "--n", "3", "--d", "3", "--seed", seed, "--out", &path(name)]);
        assert_eq!(code(&out), 0);
    }
    let read = |name: &str| fs::read_to_string(path(name)).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
}

#[test]
fn construct_reads_unitaries_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let mats = dir.path().join("u.txt");
    fs::write(&mats, "0,0 1,0\n1,0 0,0\n\n1,0 0,0\n0,0 0,1\n").unwrap();
    let out_path = dir.path().join("psi.state");
    let out = pme(&[
        "construct", "circuit-psi", "--n", "3", "--unitaries", mats.to_str().unwrap(),
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(verify_pme(&read_state_file(&out_path).unwrap(), 1e-10).unwrap().overall_pass);

    fs::write(&mats, "1,0 1,0\n0,0 1,0\n\n1,0 0,0\n0,0 1,0\n").unwrap();
    let out = pme(&[
        "construct", "circuit-psi", "--n", "3", "--unitaries", mats.to_str().unwrap(),
        "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_report_shape() {
    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("report.json");
    let out = pme(&["verify", &golden("dimer22.state"), "--out", copy.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["mode"], "pme");
    assert_eq!(v["overall_pass"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 4);
    assert_eq!(v["checks"][3]["sites"], serde_json::json!([3, 0]));
    assert_eq!(fs::read(&copy).unwrap(), out.stdout);
    let text = String::from_utf8(out.stdout).unwrap();
    let keys: Vec<_> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    assert_eq!(keys.first(), Some(&"command"));
    assert_eq!(keys.last(), Some(&"wall_time_ms"));
}

#[test]
fn ame_failures_are_listed() {
    let out = pme(&["verify", &golden("dimer22.state"), "--mode", "ame"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    let failing: Vec<_> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["sites"].clone())
        .collect();
    assert_eq!(failing, vec![serde_json::json!([0, 2]), serde_json::json!([1, 3])]);
}

#[test]
fn tolerance_flag_changes_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("near.state");
    fs::write(&path, "d 2 n 2\n0 7.0710678e-1 0\n3 7.0710678e-1 0\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(code(&pme(&["verify", p])), 1);
    assert_eq!(code(&pme(&["--tol", "1e-6", "verify", p])), 0);
}

#[test]
fn classify_reports_parameters() {
    let out = pme(&["classify", &golden("psi_zero.state")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["class"], "Intersection");
    let beta = v["parameters"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["name"] == "beta")
        .unwrap()["value"]
        .as_f64()
        .unwrap();
    assert!((beta - 0.7).abs() < 1e-12);
}

#[test]
fn gauge_violation_names_the_coefficient() {
    let out = pme(&["classify", &golden("gauge_rotated.state")]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha_1000"));
}

#[test]
fn qss_report_contents() {
    let out = pme(&[
        "protocol", "qss", &golden("dimer22.state"), "--distributor", "0", "--window", "1,2,3",
        "--secret", "0.6,0;0,0.8",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["decoding_window"], serde_json::json!([1, 2]));
    assert_eq!(v["bob"], 2);
    assert!((v["recovered"][1][1].as_f64().unwrap() - 0.8).abs() < 1e-12);
    assert_eq!(v["pass"], true);
}

#[test]
fn qss_rejects_bad_secrets() {
    let g = golden("dimer22.state");
    for secret in ["1,0;1,0", "1,0", "x,0;0,1"] {
        let out = pme(&["protocol", "qss", &g, "--window", "1,2", "--secret", secret]);
        assert_eq!(code(&out), 2, "{secret}");
    }
}

#[test]
fn non_pme_resources_are_refused() {
    let out = pme(&["protocol", "teleport-setup", &golden("zero4.state"), "--window", "0,1"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["pme_pass"], false);
    assert_eq!(v["failing_windows"].as_array().unwrap().len(), 4);
}

#[test]
fn teleport_window_must_be_a_half_arc() {
    let g = golden("dimer22.state");
    assert_eq!(code(&pme(&["protocol", "teleport-setup", &g, "--window", "0,2"])), 2);
    assert_eq!(code(&pme(&["protocol", "teleport-setup", &g, "--window", "0,1,2"])), 2);
    assert_eq!(code(&pme(&["protocol", "teleport-setup", &g, "--window", "3,0"])), 0);
}
