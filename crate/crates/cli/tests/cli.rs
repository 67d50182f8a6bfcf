use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncsphere")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn cg_examples() {
    let v = json(&["cg", "--j1", "1", "--j2", "1", "--j", "2", "--m1", "0", "--m2", "0", "--m", "0"]);
    assert!((v["value"].as_f64().unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    assert_eq!(v["exact"]["terms"][0]["p"], "6/1");
    assert_eq!(v["exact"]["terms"][0]["q"], "1/3");
    let v = json(&["cg", "--j1", "1", "--j2", "0", "--j", "1", "--m1", "1", "--m2", "0", "--m", "1"]);
    assert_eq!(v["value"], 1.0);
    let v = json(&["cg", "--j1", "1/2", "--j2", "1/2", "--j", "0", "--m1", "1/2", "--m2", "-1/2", "--m", "0"]);
    assert!((v["value"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn malformed_spins_are_usage_errors() {
    for bad in ["1/3", "1.5", "4/2", "x"] {
        let out = run(&["cg", "--j1", bad, "--j2", "0", "--j", "1", "--m1", "1", "--m2", "0", "--m", "1"]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn sixj_value() {
    // {1 1 1; 1 1 1} = 1/6
    let v = json(&["sixj", "--j1", "1", "--j2", "1", "--j3", "1", "--j4", "1", "--j5", "1", "--j6", "1"]);
    assert!((v["value"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-15);
}

#[test]
fn basis_formats() {
    let v = json(&["basis", "--n", "2", "--m", "1", "--format", "hahn"]);
    let terms = v["normal_form"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["s"], 1);
    assert_eq!(terms[0]["poly"].as_array().unwrap().len(), 2);
    let normal = json(&["basis", "--n", "2", "--m", "1", "--format", "normal"]);
    assert_eq!(normal["normal_form"], v["normal_form"]);

    let v = json(&["basis", "--k", "1", "--n", "1", "--m", "0", "--format", "matrix"]);
    let m = v["matrix"].as_array().unwrap();
    let s = 2f64.sqrt();
    for (i, want) in [-s, 0.0, s].iter().enumerate() {
        for j in 0..3 {
            let x = m[i][j][0].as_f64().unwrap();
            let expect = if i == j { *want } else { 0.0 };
            assert!((x - expect).abs() < 1e-15);
        }
    }
    let v = json(&["basis", "--n", "0", "--m", "0"]);
    assert_eq!(v["display"], "1");

    let v = json(&["basis", "--k", "1", "--n", "3", "--m", "0", "--format", "matrix"]);
    assert!(v["warning"].is_string());
    assert_eq!(v["zero_norm"], true);

    let v = json(&["basis", "--k", "1/2", "--n", "1", "--m", "1", "--format", "matrix", "--exact", "--eps", "1/2"]);
    assert_eq!(v["exact"], true);
    assert_eq!(run(&["basis", "--k", "1", "--n", "1", "--m", "2"]).status.code(), Some(2));
    assert_eq!(run(&["basis", "--n", "1", "--m", "0", "--format", "matrix"]).status.code(), Some(2));
}

#[test]
fn product_reports() {
    let v = json(&["product", "--k", "3", "--n1", "1", "--m1", "0", "--n2", "1", "--m2", "0"]);
    let nonzero: Vec<i64> = v["terms"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|t| t["coeff"][0].as_f64().unwrap().abs() > 1e-12)
        .map(|t| t["n"].as_i64().unwrap())
        .collect();
    assert_eq!(nonzero, vec![0, 2]);
    assert!(v["residual"].as_f64().unwrap() < 1e-12);
    let v = json(&["product", "--k", "1", "--n1", "2", "--m1", "0", "--n2", "2", "--m2", "0"]);
    assert_eq!(v["truncated"], true);
    assert!(v["degenerate"].as_array().unwrap().contains(&Value::from(3)));
}

#[test]
fn verify_reports_and_exit_codes() {
    let v = json(&["verify", "--suite", "table1"]);
    assert_eq!(v["schema_version"], 1);
    let checks = v["checks"].as_array().unwrap();
    let rows: Vec<&Value> = checks.iter().filter(|c| c["name"].as_str().unwrap().starts_with("P^")).collect();
    assert_eq!(rows.len(), 16);
    assert_eq!(rows.iter().filter(|c| c["advisory"] == true).count(), 2);
    assert_eq!(rows.iter().filter(|c| c["pass"] == true && c["advisory"] == false).count(), 14);

    let v = json(&["verify", "--suite", "norms", "--k-max", "6"]);
    assert_eq!(v["pass"], true);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["measured"].is_number() && c.get("bound").is_some()));

    assert_eq!(run(&["verify", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "norms", "--tol", "-1"]).status.code(), Some(2));
    // a tolerance nobody meets is a check failure, not a usage error
    let out = run(&["verify", "--suite", "eigen", "--k-max", "2", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn verify_is_deterministic_and_writes_files() {
    let dir = std::env::temp_dir().join(format!("ncsphere-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for p in [&a, &b] {
        let out = run(&["verify", "--suite", "poisson", "--n-max", "2", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn k_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_ncsphere"))
        .args(["basis", "--k", "5", "--n", "1", "--m", "0", "--format", "matrix"])
        .env("NC_SPHERE_KCAP", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_ncsphere"))
        .args(["verify", "--suite", "norms", "--k-max", "5"])
        .env("NC_SPHERE_KCAP", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_all_passes() {
    let out = run(&["verify", "--suite", "all", "--k-max", "5", "--format", "compact"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let failing: Vec<&Value> = v["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false && c["advisory"] == false).collect();
    assert_eq!(out.status.code(), Some(0), "{failing:#?}");
}
