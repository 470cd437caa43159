use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toricabel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut a = args.to_vec();
    a.push("--json");
    let out = run(&a);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    });
    (v, out.status.code().unwrap())
}

#[test]
fn check_plane_line_bundle() {
    let (v, code) = json(&["check", "--fan", "P2", "--bundle", "H"]);
    assert_eq!(code, 0);
    assert_eq!(v["globally_generated"], true);
    assert_eq!(v["essential"], true);
    assert!(v["condition_star"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["holds"] == true));
}

#[test]
fn check_product_bundle_is_not_very_ample() {
    let (v, code) = json(&["check", "--fan", "P1xP1", "--bundle", "(2,0)"]);
    assert_eq!(code, 0);
    assert_eq!(v["globally_generated"], true);
    assert_eq!(v["essential"], true);
    assert_eq!(v["very_ample"], false);
}

#[test]
fn malformed_ray_exits_with_input_error() {
    let out = run(&[
        "check",
        "--fan",
        r#"{"n":2,"rays":[[2,0],[0,1],[-1,-1]],"max_cones":[[0,1],[1,2],[2,0]]}"#,
        "--bundle",
        "H",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not primitive"));
}

#[test]
fn unparsable_bundle_reports_position() {
    let out = run(&["check", "--fan", "P1xP1", "--bundle", "(1,x)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("position"));
}

#[test]
fn decompose_tables() {
    let (v, _) = json(&["decompose", "--fan", "P2", "--bundle", "H+H"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["tau"], "{0}");
    assert_eq!(rows[0]["subset"], serde_json::json!([0, 1]));

    // gg but not essential: H ⊕ O on P2
    let (v, _) = json(&["decompose", "--fan", "P2", "--bundle", "H+0H"]);
    assert!(v["rows"].as_array().unwrap().is_empty());

    // F_2 with a fixed component
    let (v, _) = json(&["decompose", "--fan", "Hirzebruch(2)", "--bundle", "[0,1,0,1]"]);
    assert!(v["rows"].as_array().unwrap().len() >= 2, "{v}");
}

#[test]
fn mixvol_and_resultant_degrees() {
    let (v, _) = json(&["mixvol", "--fan", "P1xP1", "--bundle", "(2,0)", "--tau", "0"]);
    assert_eq!(v["numbers"][0]["number"], 0);
    let (v, _) = json(&["mixvol", "--fan", "P1xP1", "--bundle", "(2,0)", "--tau", "2"]);
    assert_eq!(v["numbers"][0]["number"], 2);

    let (v, _) = json(&["resultant-degree", "--fan", "P2", "--bundle", "H+H", "--cycle", "0"]);
    assert_eq!(v["multidegree"], serde_json::json!([1, 1]));
    let (v, _) = json(&["resultant-degree", "--fan", "P2", "--bundle", "H+2H", "--cycle", "0"]);
    assert_eq!(v["multidegree"], serde_json::json!([2, 1]));
    let (v, _) = json(&["resultant-degree", "--fan", "P2", "--bundle", "H+2H"]);
    assert_eq!(v["multidegree"], serde_json::json!([0, 0]));
}

#[test]
fn invert_recovers_a_conic() {
    let (v, code) = json(&["invert", "--fan", "P2", "--bundle", "H", "--random", "2", "--seed", "7"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["passed"], true);
    assert_eq!(v["n_points"], 2);
    assert_eq!(v["class_intersection"], 2);
    assert!(v["coefficient_error"].as_f64().unwrap() <= 1e-5);
}

#[test]
fn invert_with_zero_form_is_degenerate() {
    let out = run(&["invert", "--fan", "P2", "--bundle", "H", "--random", "2", "--form-zero"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate form"));
}

#[test]
fn invert_refuses_a_chart_without_the_simplex() {
    let out = run(&["invert", "--fan", "P1xP1", "--bundle", "(1,0)", "--random", "2,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("condition (*)"));
}

#[test]
fn invert_from_a_given_parabola() {
    let curve = r#"{"coeffs": [[[0,1], 1.0, 0.0], [[2,0], -1.0, 0.0]]}"#;
    let form = r#"{"coeffs": [[[1,0], 1.0, 0.0]]}"#;
    let (v, code) = json(&[
        "invert", "--fan", "P2", "--bundle", "H", "--curve", curve, "--form", form,
    ]);
    assert_eq!(code, 0, "{v}");
    assert!(v["coefficient_error"].as_f64().unwrap() <= 1e-6);
    assert!(v["form_error"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn json_output_is_byte_identical_for_a_seed() {
    let args = [
        "invert", "--fan", "P1xP1", "--bundle", "(1,1)", "--random", "2,1", "--seed", "11", "--json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&[
        "invert", "--fan", "P1xP1", "--bundle", "(1,1)", "--random", "2,1", "--seed", "12", "--json",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn json_floats_carry_seventeen_digits() {
    let out = run(&["invert", "--fan", "P2", "--bundle", "H", "--random", "2", "--json"]);
    let s = String::from_utf8(out.stdout).unwrap();
    let line = s.lines().find(|l| l.contains("\"coefficient_error\"")).unwrap();
    let num = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let mantissa = num.trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17, "{num}");
}
