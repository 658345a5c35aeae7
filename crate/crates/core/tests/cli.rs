//! End-to-end runs of the `aqec` binary against the bundled catalog.

use std::path::PathBuf;
use std::process::{Command, Output};

use aqec::io::{algebra_from_str, channel_from_str};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn aqec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aqec")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

#[test]
fn bitflip_code_is_exact_for_the_full_qubit_algebra() {
    let o = aqec(&["check-exact", "--channel", &path("bitflip3.json"), "--algebra", &path("full-qubit-algebra.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "EXACT (defect 0.0e0)");
}

#[test]
fn dephasing_is_not_exact_for_the_full_algebra() {
    let o = aqec(&["check-exact", "--channel", &path("dephasing.json"), "--algebra", &path("full-qubit-algebra.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("NOT EXACT"));
}

#[test]
fn dephasing_is_exact_for_the_diagonal_algebra() {
    let o = aqec(&["check-exact", "--channel", &path("dephasing.json"), "--algebra", &path("diagonal-qubit-algebra.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn malformed_json_is_an_input_error_with_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"dim_in\": 2,\n  \"dim_out\": \n").unwrap();
    let o = aqec(&["delta", "--channel", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn dimension_mismatch_is_named() {
    let o = aqec(&["delta", "--channel", &path("bitflip3.json"), "--code", &path("ad4_code.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("dimension"));
}

#[test]
fn verify_bounds_on_the_exact_code() {
    let o = aqec(&["verify-bounds", "--channel", &path("bitflip3.json"), "--algebra", &path("full-qubit-algebra.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "δ=0.000 E=0.000 BOUNDS OK");
}

#[test]
fn verify_bounds_json_report_has_the_documented_fields() {
    let o = aqec(&["verify-bounds", "--channel", &path("amplitude_damping.json"), "--output", "json", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["delta", "optimal_error", "exact", "kl_defect", "bounds_ok", "recovery", "tolerances", "seed"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["seed"], 4);
    channel_from_str(&v["recovery"].to_string()).unwrap();
}

#[test]
fn diamond_between_identity_and_full_depolarizing() {
    let o = aqec(&[
        "diamond",
        "--channel",
        &path("identity.json"),
        "--channel",
        &path("depolarizing-full.json"),
        "--output",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let d = v["diamond"].as_f64().unwrap();
    assert!((d - 1.5).abs() <= 1e-5, "{d}");
    assert!(v["sampled_lower_bound"].as_f64().unwrap() <= d + 1e-9);
}

#[test]
fn diamond_needs_two_channels() {
    let o = aqec(&["diamond", "--channel", &path("identity.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn largest_algebra_of_dephasing_is_diagonal() {
    let o = aqec(&["largest-algebra", "--channel", &path("dephasing.json")]);
    assert_eq!(o.status.code(), Some(0));
    let alg = algebra_from_str(&stdout(&o)).unwrap();
    assert_eq!(alg.blocks().len(), 2);
    assert!(alg.blocks().iter().all(|b| b.d_a() == 1 && b.d_b() == 1));
}

#[test]
fn complement_emits_a_loadable_channel() {
    let o = aqec(&["complement", "--channel", &path("amplitude_damping.json")]);
    assert_eq!(o.status.code(), Some(0));
    let comp = channel_from_str(&stdout(&o)).unwrap();
    assert_eq!((comp.dim_in(), comp.dim_out()), (2, 2));
}

#[test]
fn code_flag_composes_with_the_encoding() {
    let o = aqec(&["delta", "--channel", &path("ad4-noise.json"), "--code", &path("ad4_code.json")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let value: f64 = text.trim().trim_start_matches("δ = ").parse().unwrap();
    assert!(value > 0.0 && value < 1.0, "{text}");
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let args = ["optimal", "--channel", &path("amplitude_damping.json"), "--output", "json", "--seed", "9"];
    let (a, b) = (aqec(&args), aqec(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let args = ["diamond", "--channel", &path("identity.json"), "--channel", &path("dephasing.json"), "--output", "json"];
    assert_eq!(aqec(&args).stdout, aqec(&args).stdout);
}

#[test]
fn unknown_named_channel_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("x.json");
    std::fs::write(&f, r#"{"name": "teleport", "params": [], "dim": 2}"#).unwrap();
    let o = aqec(&["complement", "--channel", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
