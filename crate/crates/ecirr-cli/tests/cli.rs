//! End-to-end tests driving the compiled `ecirr` binary over the bundled
//! data files and small throwaway fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ecirr"))
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout parses as JSON")
}

fn write_tmp(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn transform_matches_degree_and_roundtrips_json() {
    let map = data_dir().join("f83_l17.json");
    let out = run(&[
        "transform",
        "--map",
        map.to_str().unwrap(),
        "--poly",
        "[81,3,0,1]",
        "--emit",
        "json",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["degree"], 51);
    // Degree 51 is under the print limit, so coefficients are included and
    // must reassemble to the digest the library computes.
    let coeffs: Vec<i64> = serde_json::from_value(v["coeffs"].clone()).unwrap();
    assert_eq!(coeffs.len(), 52);
    let ctx = ecirr_core::FieldCtx::prime(83).unwrap();
    let poly = ecirr_core::Poly::from_ints(&ctx, &coeffs);
    assert_eq!(v["digest"], ecirr_core::io::poly_digest(&poly));

    // Text mode prints the same coefficient vector.
    let text = run(&["transform", "--map", map.to_str().unwrap(), "--poly", "[81,3,0,1]"]);
    assert!(text.status.success());
    let line = String::from_utf8_lossy(&text.stdout);
    let reparsed: Vec<i64> = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(reparsed, coeffs);
}

#[test]
fn iterate_writes_step_files_and_reports_degrees() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("steps");
    let out = run(&[
        "iterate",
        "--curve",
        data_dir().join("f83_curve.json").to_str().unwrap(),
        "--map",
        data_dir().join("f83_l17.json").to_str().unwrap(),
        "--f0",
        "[81,3,0,1]",
        "--target",
        "2",
        "--selection",
        "largest-degree",
        "--seed",
        "7",
        "--emit",
        "json",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["degrees"], serde_json::json!([3, 6, 102]));
    assert_eq!(v["restarts"], 0);
    assert_eq!(v["steps"][1]["factor_degrees"], serde_json::json!([3, 6, 6, 6, 6, 6, 6, 6, 6]));

    // Every step landed in its own file, and file coefficients match the
    // digest reported on stdout.
    let ctx = ecirr_core::FieldCtx::prime(83).unwrap();
    for i in 0..=2 {
        let file: Value =
            serde_json::from_str(&std::fs::read_to_string(out_dir.join(format!("f{i}.json"))).unwrap())
                .unwrap();
        assert_eq!(file["index"], i);
        let coeffs: Vec<i64> = serde_json::from_value(file["coeffs"].clone()).unwrap();
        let poly = ecirr_core::Poly::from_ints(&ctx, &coeffs);
        assert_eq!(file["digest"], ecirr_core::io::poly_digest(&poly));
        assert_eq!(file["digest"], v["steps"][i as usize]["poly"]["digest"]);
    }
}

#[test]
fn reproduce_paper_short_horizon_passes() {
    let out = run(&[
        "reproduce-paper",
        "--data",
        data_dir().to_str().unwrap(),
        "--target",
        "1",
        "--emit",
        "json",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["all_ok"], true);
    assert_eq!(v["degrees"], serde_json::json!([3, 6]));
}

#[test]
fn corrupted_map_fails_endomorphism_check() {
    let tmp = tempfile::tempdir().unwrap();
    let mut map: Value =
        serde_json::from_str(&std::fs::read_to_string(data_dir().join("f83_l17.json")).unwrap())
            .unwrap();
    // Perturb one numerator coefficient; the map is no longer the x-part
    // of any endomorphism of this curve.
    let a3 = map["a"][3].as_i64().unwrap();
    map["a"][3] = Value::from((a3 + 1) % 83);
    let bad = write_tmp(tmp.path(), "bad_map.json", &map.to_string());

    let out = run(&[
        "verify-endo",
        "--curve",
        data_dir().join("f83_curve.json").to_str().unwrap(),
        "--map",
        bad.to_str().unwrap(),
        "--pairs",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL"), "stdout: {text}");

    // The pristine map passes with exit 0.
    let good = run(&[
        "verify-endo",
        "--curve",
        data_dir().join("f83_curve.json").to_str().unwrap(),
        "--map",
        data_dir().join("f83_l17.json").to_str().unwrap(),
        "--pairs",
        "64",
    ]);
    assert!(good.status.success());
    assert!(String::from_utf8_lossy(&good.stdout).contains("PASS"));
}

#[test]
fn valuation_reports_exponent_and_cofactor() {
    let out = run(&[
        "valuation",
        "--D",
        "-19",
        "--alpha",
        "[-3,-1]",
        "--beta",
        "[6,2]",
        "--emit",
        "json",
    ]);
    let v = stdout_json(&out);
    // beta = -2 * alpha, and -2 is not divisible by alpha (norm 17).
    assert_eq!(v["k"], 1);
    assert_eq!(v["cofactor"]["c0"], "-2");
    assert_eq!(v["cofactor"]["c1"], "0");

    let zero = run(&["valuation", "--D", "-19", "--alpha", "[-3,-1]", "--beta", "[0,0]"]);
    assert_eq!(zero.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&zero.stderr).contains("DivisionByZero"));
}

#[test]
fn count_points_base_and_extension() {
    let curve = data_dir().join("f83_curve.json");
    let base = run(&["count-points", "--curve", curve.to_str().unwrap(), "--emit", "json"]);
    let v = stdout_json(&base);
    assert_eq!(v["points"], 68);
    assert_eq!(v["trace"], 16);
    assert_eq!(v["ordinary"], true);

    let ext = run(&[
        "count-points",
        "--curve",
        curve.to_str().unwrap(),
        "--ext",
        "2",
        "--emit",
        "json",
    ]);
    let v = stdout_json(&ext);
    assert_eq!(v["extension"]["predicted"], "6800");
    assert_eq!(v["extension"]["recounted"], 6800);
}

#[test]
fn factor_splits_over_described_field() {
    let tmp = tempfile::tempdir().unwrap();
    let field = write_tmp(tmp.path(), "f5.json", r#"{"p":5,"n":1,"modulus":[0,1]}"#);
    let out = run(&[
        "factor",
        "--field",
        field.to_str().unwrap(),
        "--poly",
        "[4,0,1]",
        "--emit",
        "json",
    ]);
    let v = stdout_json(&out);
    // x^2 - 1 = (x+1)(x+4) over F_5.
    assert_eq!(v["unit"], serde_json::json!([1]));
    let mut factors: Vec<Vec<i64>> = v["factors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| serde_json::from_value(f["poly"]["coeffs"].clone()).unwrap())
        .collect();
    factors.sort();
    assert_eq!(factors, vec![vec![1, 1], vec![4, 1]]);
}

#[test]
fn graph_profiles_subfield_trees_and_emits_dot() {
    let tmp = tempfile::tempdir().unwrap();
    // Degree-3 endomorphism map over F_5, profiled over F_25.
    let map = write_tmp(
        tmp.path(),
        "l3.json",
        r#"{"a":[2,0,1,1],"b":[1,4,4],"l":3,"field":{"p":5,"n":1,"modulus":[0,1]}}"#,
    );
    let f25 = write_tmp(tmp.path(), "f25.json", r#"{"p":5,"n":2,"modulus":[2,0,1]}"#);
    let out = run(&[
        "graph",
        "--map",
        map.to_str().unwrap(),
        "--field",
        f25.to_str().unwrap(),
        "--subfield-deg",
        "1",
        "--emit",
        "json",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["vertices"], 26);
    let depth = v["profile"]["common_subfield_depth"].as_u64().unwrap();
    assert!(depth >= 1);
    assert!(!v["profile"]["subfield_trees"].as_array().unwrap().is_empty());

    let dot = run(&["graph", "--map", map.to_str().unwrap(), "--emit", "dot"]);
    assert!(dot.status.success());
    let text = String::from_utf8_lossy(&dot.stdout);
    assert!(text.starts_with("digraph"));
    assert!(text.contains("\"inf\""));
}

#[test]
fn usage_errors_exit_two_and_domain_errors_exit_one() {
    let usage = run(&["count-points", "--no-such-flag"]);
    assert_eq!(usage.status.code(), Some(2));

    // A cap below the field size turns enumeration into a domain error.
    let capped = bin()
        .args(["count-points", "--curve", data_dir().join("f83_curve.json").to_str().unwrap()])
        .env("ECIRR_ENUM_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("FieldTooLarge"));
}
