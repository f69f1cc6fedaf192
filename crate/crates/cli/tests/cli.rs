use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mahonian(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mahonian"))
        .args(args)
        .env_remove("MAHONIAN_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_json(args: &[&str]) -> Value {
    let out = mahonian(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn poly_galois_example() {
    let v = stdout_json(&["poly", "--n", "2", "--m", "2"]);
    assert_eq!(v["coeffs"], serde_json::json!(["3", "1"]));
}

#[test]
fn poly_binomial_and_multinomial() {
    let v = stdout_json(&["poly", "--n", "4", "--k", "2"]);
    assert_eq!(v["coeffs"], serde_json::json!(["1", "1", "2", "1", "1"]));
    let v = stdout_json(&["poly", "--parts", "1,1,1"]);
    assert_eq!(v["coeffs"], serde_json::json!(["1", "2", "2", "1"]));
}

#[test]
fn poly_rejects_mixed_modes() {
    let out = mahonian(&["poly", "--n", "4", "--k", "2", "--m", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pmf_trivial_example_is_exact_bytes() {
    let out = mahonian(&["pmf", "--n", "1", "--m", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "{\"denominator\":\"5\",\"numerators\":[\"5\"]}\n");
}

#[test]
fn moments_example() {
    let v = stdout_json(&["moments", "--n", "3", "--m", "2"]);
    assert_eq!(v["closed_form"]["mean"]["num"], "3");
    assert_eq!(v["closed_form"]["mean"]["den"], "4");
    assert_eq!(v["closed_form"]["variance"]["num"], "11");
    assert_eq!(v["closed_form"]["variance"]["den"], "16");
    assert_eq!(v["exact_equal"], true);
}

#[test]
fn tv_rows_stay_within_bound() {
    let v = stdout_json(&["tv", "--n", "8", "--ms", "2,5,50"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["exact"]["within_bound"] == "true"));
}

#[test]
fn curves_in_csv() {
    let out = mahonian(&["llt", "--ms", "2,3", "--ns", "16,32", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "m,n,residual_approx,residual_exact");
    assert_eq!(data.len(), 5);
}

#[test]
fn bijections_pass_and_budget() {
    let v = stdout_json(&["bijections", "--max-n", "10"]);
    assert_eq!(v["paths_checked"], 2047);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
    let out = mahonian(&["bijections", "--max-n", "40"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn degenerate_and_malformed_parameters_exit_2() {
    for args in [
        vec!["llt", "--ns", "1"],
        vec!["clt", "--m", "1"],
        vec!["pmf", "--n", "3", "--m", "0"],
        vec!["sample", "word", "--n", "10", "--reps", "0"],
        vec!["poly", "--n", "abc", "--m", "2"],
        vec!["nonsense"],
    ] {
        let out = mahonian(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn sample_output_is_seeded_and_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let out = mahonian(&[
            "sample", "word", "--n", "30", "--m", "3", "--reps", "500", "--seed", seed, "--format", "csv", "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    let a = run("a.csv", "11");
    let b = run("b.csv", "11");
    let c = run("c.csv", "12");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# construction=word n=30 m=3 reps=500 master_seed=11 stream_index=0"));
    assert_eq!(text.lines().nth(1), Some("rep,V,N1,N2,N3"));
    assert_eq!(text.lines().count(), 502);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mahonian"))
        .args(["sample", "ferrers", "--n", "12", "--reps", "50"])
        .env("MAHONIAN_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let path = dir.path().join("sample.json");
    assert!(Path::new(&path).exists());
    let v: Value = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 50);
    assert_eq!(v["metadata"]["n"], 12);
}

#[test]
fn u_and_word_summaries_agree_with_closed_mean() {
    // E[V] = n(n-1)(m-1)/(4m) = 195 at n = 40, m = 2.
    for kind in ["word", "u"] {
        let v = stdout_json(&["sample", kind, "--n", "40", "--reps", "20000", "--summary"]);
        let mean = v["summary"]["mean"].as_f64().unwrap();
        let sd = v["summary"]["variance"].as_f64().unwrap().sqrt();
        assert!((mean - 195.0).abs() < 4.0 * sd / (20000f64).sqrt(), "{kind}: {mean}");
    }
}
