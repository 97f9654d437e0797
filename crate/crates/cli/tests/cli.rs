use std::process::{Command, Output};

use serde_json::Value;

fn nlqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlqc")).args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

#[test]
fn gh_and_truth_table() {
    let o = nlqc(&["gh", "--strategy", "and", "--exhaustive"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let sides: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["side"].as_u64().unwrap()).collect();
    assert_eq!(sides, vec![0, 0, 0, 1]);
    assert_eq!(v["summary"]["register_bits"], 4);
}

#[test]
fn gh_or_from_file() {
    let dir = std::env::temp_dir().join(format!("nlqc-gh-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("one.json");
    std::fs::write(&path, r#"{"E": 1, "nx": 1, "ny": 1, "left": {"1": [["Q", "L1"]]}, "right": {}}"#).unwrap();
    let o = nlqc(&["gh", "--file", path.to_str().unwrap(), "--exhaustive", "--d", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let sides: Vec<u64> = json(&o)["rows"].as_array().unwrap().iter().map(|r| r["side"].as_u64().unwrap()).collect();
    assert_eq!(sides, vec![0, 0, 1, 1]);
}

#[test]
fn quick_suite_passes() {
    let o = nlqc(&["suite", "--quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["rows"].as_array().unwrap().len(), 20);
}

#[test]
fn marginal_geometry_row() {
    let o = nlqc(&["geometry", "--preset", "marginal", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let headers = rows.headers().unwrap().clone();
    let rec = rows.records().next().unwrap().unwrap();
    let field = |name: &str| -> f64 {
        let i = headers.iter().position(|h| h.starts_with(name)).unwrap();
        rec[i].parse().unwrap()
    };
    assert_eq!(field("mutual_information"), 0.0);
    assert_eq!(field("ridge_length"), 0.0);
}

#[test]
fn geometry_points_and_delay() {
    let o = nlqc(&["geometry", "--c0", "0,0", "--c1", "0,3.141592653589793", "--r0", "3.3415926,1.5707963", "--r1", "3.3415926,-1.5707963"]);
    assert_eq!(o.status.code(), Some(0));
    let a = json(&o);
    let b = json(&nlqc(&["geometry", "--preset", "delay-0.2"]));
    let (ra, rb) = (&a["rows"][0], &b["rows"][0]);
    assert!((ra["ridge_length"].as_f64().unwrap() - rb["ridge_length"].as_f64().unwrap()).abs() < 1e-6);
    // Symmetric delay δ: ridge 2 artanh(sin δ).
    let want = 2.0 * 0.2f64.sin().atanh();
    assert!((rb["ridge_length"].as_f64().unwrap() - want).abs() < 1e-6);
}

#[test]
fn deterministic_output() {
    for args in [
        vec!["code-route", "--f", "or", "--seed", "9"],
        vec!["clifford-nlqc", "--d", "3", "--count", "3", "--seed", "4"],
        vec!["bound-check", "--count", "5", "--format", "csv"],
    ] {
        let a = nlqc(&args);
        let b = nlqc(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["gh", "--strategy", "and"],
        vec!["gh", "--strategy", "xor", "--exhaustive"],
        vec!["geometry", "--preset", "nope"],
        vec!["geometry", "--c0", "0,0"],
        vec!["surgery", "--mode", "pbt", "--protocol", "swap"],
        vec!["suite", "--only", "11"],
        vec!["frobnicate"],
    ] {
        assert_eq!(nlqc(&args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(nlqc(&["--help"]).status.code(), Some(0));
}

#[test]
fn bound_check_reports_the_counterexample() {
    let o = nlqc(&["bound-check", "--seed", "8", "--count", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let s = &v["summary"]["summary"];
    assert_eq!(s["violations"], serde_json::json!([10]));
    assert_eq!(s["kl_pass"], 4);
    assert_eq!(v["units"]["half_i"], "nats");
}

#[test]
fn surgery_modes() {
    let o = nlqc(&["surgery", "--protocol", "swap"]);
    assert_eq!(o.status.code(), Some(0));
    let row = &json(&o)["rows"][0];
    assert_eq!(row["n_prime"], 2);
    assert!(row["choi_distance"].as_f64().unwrap() < 1e-9);
    let o = nlqc(&["surgery", "--protocol", "z-flip", "--mode", "pbt", "--N", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((json(&o)["rows"][0]["choi_distance"].as_f64().unwrap() - 0.75).abs() < 1e-9);
}

#[test]
fn pbt_and_bk_tables() {
    let o = nlqc(&["pbt", "--ports", "1,2,3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 4);
    let o = nlqc(&["bk", "--unitary", "swap", "--ports", "1,2"]);
    assert_eq!(o.status.code(), Some(0));
    let d1 = json(&o)["rows"][0]["choi_distance"].as_f64().unwrap();
    // One port discards everything: 1 − 1/16.
    assert!((d1 - 15.0 / 16.0).abs() < 1e-9);
}

#[test]
fn out_file_and_threads() {
    let path = std::env::temp_dir().join(format!("nlqc-out-{}.json", std::process::id()));
    let o = Command::new(env!("CARGO_BIN_EXE_nlqc"))
        .args(["code-route", "--f", "and", "--out", path.to_str().unwrap()])
        .env("NLQC_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    let bad = Command::new(env!("CARGO_BIN_EXE_nlqc")).args(["pbt"]).env("NLQC_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
