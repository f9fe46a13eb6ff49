//! Integration tests for the `orlicz` binary: exit-code contract, output
//! formats, round-trip of written artifacts.

use std::process::{Command, Output};

fn orlicz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orlicz"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn compute_ball_affine() {
    let o = orlicz(&[
        "compute", "--body", "ball:1", "--phi", "power:2", "--quantity", "affine", "--grid", "128",
        "--restarts", "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let value = v["result"]["value"].as_f64().unwrap();
    assert!((value - 2.0 * std::f64::consts::PI).abs() < 1e-2);
    assert_eq!(v["result"]["certified_side"], "upper_bound");
}

#[test]
fn compute_constant_v_phi_is_volume() {
    // V_phi(K, Q) with constant phi = 1 equals |K| for any Q.
    let o = orlicz(&[
        "compute", "--body", "random:polytope:3", "--body", "ball:2", "--phi", "constant:1",
        "--quantity", "v-phi",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let value = v["result"]["value"].as_f64().unwrap();
    let vol = orlicz_core::bodies::random_body(2, 3, orlicz_core::bodies::BodyClass::Polytope)
        .unwrap()
        .volume()
        .unwrap();
    assert!((value - vol).abs() < 1e-10 * vol);
}

#[test]
fn compute_polytope_degenerate_exits_2() {
    let o = orlicz(&[
        "compute", "--body", "random:polytope:5", "--phi", "power:2", "--quantity", "affine",
        "--grid", "128",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["degenerate"], true);
    assert!(v["result"]["value"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn compute_parse_error_exits_1() {
    let o = orlicz(&[
        "compute", "--body", "no-such-file.json", "--phi", "power:2", "--quantity", "affine",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ParseError"));
}

#[test]
fn verify_unknown_suite_exits_1() {
    let o = orlicz(&["verify", "--suite", "bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("UnknownSuite"));
}

#[test]
fn verify_suite_json_summary() {
    let o = orlicz(&["verify", "--suite", "lp-consistency", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"]["violated"], 0);
    assert!(v["summary"]["certified"].as_u64().unwrap() > 0);
}

#[test]
fn sweep_requires_axis() {
    let o = orlicz(&["sweep", "--body", "ball:1", "--quantity", "affine"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ParseError"));
}

#[test]
fn sweep_p_axis_ball() {
    let o = orlicz(&[
        "sweep", "--body", "ball:1", "--quantity", "affine", "--axis", "p=0.5,1,2,4", "--grid",
        "128", "--restarts", "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "param,value,certified_side,runtime_ms,monotone_refinement"
    );
    for line in lines {
        let value: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((value - 2.0 * std::f64::consts::PI).abs() < 1e-2, "{line}");
    }
}

#[test]
fn out_file_written_atomically() {
    let dir = std::env::temp_dir().join(format!("orlicz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.csv");
    let o = orlicz(&[
        "verify", "--suite", "lp-consistency", "--seed", "3", "--format", "csv", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("suite,bodies,phis,lhs,rhs,margin,status,notes"));
    assert!(!dir.join(".orlicz-tmp").exists());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn body_artifact_roundtrip() {
    // A body JSON written by the library re-parses to bit-identical
    // evaluations through the CLI path.
    let dir = std::env::temp_dir().join(format!("orlicz-rt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let body = orlicz_core::bodies::random_body(2, 9, orlicz_core::bodies::BodyClass::Polytope)
        .unwrap();
    let path = dir.join("body.json");
    std::fs::write(&path, serde_json::to_string(&body).unwrap()).unwrap();
    let run = || {
        stdout(&orlicz(&[
            "compute", "--body", path.to_str().unwrap(), "--phi", "constant:1", "--quantity",
            "s-phi",
        ]))
    };
    let a = run();
    let b = run();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    std::fs::remove_dir_all(&dir).unwrap();
}
