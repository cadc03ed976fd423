use std::process::{Command, Output};

use genus2::lattice::{z2_lattice_eps, EvenLattice, ThetaPolicy};
use genus2::modular_forms::EvalPolicy;
use genus2::series::catalan_f_value;
use genus2::sewing_eps::{z1_boson, EpsPoint, SewPolicy};
use genus2::{C64, TWO_PI_I};
use serde_json::Value;

fn genus2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genus2")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn complex(v: &Value) -> C64 {
    C64::new(v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn period_matrix_in_siegel_space() {
    let out = genus2(&["period", "--scheme", "eps", "--tau1", "2i", "--tau2", "2i", "--eps", "0.2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["im_omega_positive_definite"], Value::Bool(true));
    assert_eq!(complex(&v["omega"][0][1]), complex(&v["omega"][1][0]));
    assert!(complex(&v["omega"][0][1]).im > 0.0);
}

#[test]
fn output_is_byte_identical() {
    let args = ["period", "--scheme", "rho", "--tau", "0.1+1.2i", "--w", "0.4+0.1i", "--chi", "0.1"];
    let a = genus2(&args);
    let b = genus2(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn partition_at_zero_eps_is_genus_one_product() {
    let ev = EvalPolicy::default();
    let z = z1_boson(C64::new(0.0, 2.0), &ev).unwrap() * z1_boson(C64::new(0.1, 1.5), &ev).unwrap();
    for (c, want) in [("1", z), ("2", z * z)] {
        let out = genus2(&[
            "partition", "--scheme", "eps", "--tau1", "2i", "--tau2", "0.1+1.5i", "--eps", "0", "--c", c,
        ]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        assert_eq!(v["model"], "boson");
        assert!((complex(&v["value"]) - want).norm() < 1e-15 * want.norm());
    }
}

#[test]
fn lattice_file_and_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let lat = dir.path().join("a1.json");
    std::fs::write(&lat, r#"{"rank": 1, "gram": [[2]]}"#).unwrap();
    let out_path = dir.path().join("z.json");
    let out = genus2(&[
        "partition", "--scheme", "eps", "--tau", "1.2i", "--eps", "0.1+0.05i",
        "--lattice", lat.to_str().unwrap(), "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["model"], "lattice");
    let pt = EpsPoint::new(C64::new(0.0, 1.2), C64::new(0.0, 1.2), C64::new(0.1, 0.05)).unwrap();
    let (want, _) = z2_lattice_eps(&EvenLattice::a1(), &pt, &SewPolicy::default(), &ThetaPolicy::default()).unwrap();
    assert!((complex(&v["value"]) - want).norm() < 1e-14 * want.norm());
}

#[test]
fn odd_lattice_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let lat = dir.path().join("odd.json");
    std::fs::write(&lat, r#"{"rank": 1, "gram": [[1]]}"#).unwrap();
    let out = genus2(&["partition", "--scheme", "eps", "--tau", "2i", "--eps", "0.1", "--lattice", lat.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_violations_state_the_inequality() {
    let out = genus2(&["period", "--scheme", "eps", "--tau1", "i", "--tau2", "i", "--eps", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("is not below D(q1) D(q2) / 4"), "{err}");
    let out = genus2(&["period", "--scheme", "rho", "--tau", "2i", "--w", "0.3", "--rho", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("is not above 2|rho|^(1/2)"));
}

#[test]
fn malformed_arguments() {
    assert_eq!(genus2(&["period", "--scheme", "eps", "--tau", "2k", "--eps", "0.1"]).status.code(), Some(2));
    assert_eq!(genus2(&["period", "--scheme", "rho", "--tau", "2i", "--w", "0.3"]).status.code(), Some(2));
    assert_eq!(genus2(&["verify", "everything"]).status.code(), Some(2));
}

#[test]
fn csv_format() {
    let out = genus2(&["period", "--scheme", "eps", "--tau", "2i", "--eps", "-0.1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("field,value\n"));
    assert!(text.lines().any(|l| l.starts_with("omega.0.1,")));
}

#[test]
fn omega_chi_expansion_starts_at_log_f() {
    let chi = C64::new(0.1, 0.0);
    let out = genus2(&["expand", "omega-chi", "--tau", "2i", "--chi", "0.1", "--order", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["series"]["o22"].as_array().unwrap().len(), 3);
    assert!((complex(&v["series"]["o22"][0]) - catalan_f_value(chi).ln()).norm() < 1e-15);
    assert!((complex(&v["series"]["o11"][0]) - TWO_PI_I * C64::new(0.0, 2.0)).norm() < 1e-14);
}

#[test]
fn verify_reports_sorted_items() {
    let out = genus2(&["verify", "catalan"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["suite"], "catalan");
    let names: Vec<&str> = v["items"].as_array().unwrap().iter().map(|i| i["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn comparison_suite_fits_the_w2_coefficient() {
    let out = genus2(&["verify", "comparison", "--chi", "0.1"]);
    let v = json(&out);
    let item = v["items"]
        .as_array()
        .unwrap()
        .iter()
        .find(|i| i["name"].as_str().unwrap().ends_with("unnormalized_w2"))
        .unwrap();
    assert!((complex(&item["expected"]).re - 0.6 / 144.0).abs() < 1e-15);
    assert_eq!(item["pass"], Value::Bool(true));
    // exit status follows the whole report
    assert_eq!(out.status.code(), Some(if v["pass"] == Value::Bool(true) { 0 } else { 1 }));
}
