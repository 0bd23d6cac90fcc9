use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gou-ruin")).args(args).output().expect("spawn gou-ruin")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn export(dir: &Path) {
    let o = run(&["verify-examples", "--no-sim", "--export", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

fn model(dir: &Path, name: &str) -> String {
    dir.join(format!("{name}.json")).display().to_string()
}

fn num(v: &Value) -> f64 {
    match v {
        Value::Number(n) => n.as_f64().unwrap(),
        Value::String(s) if s == "inf" => f64::INFINITY,
        Value::String(s) if s == "-inf" => f64::NEG_INFINITY,
        other => panic!("not a number: {other}"),
    }
}

#[test]
fn verify_examples_passes_with_schema() {
    let o = run(&["verify-examples"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["pass"], true);
    assert!(v["fixtures"].as_array().unwrap().len() >= 20);
}

#[test]
fn thetas_of_subordinator_example() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path());
    let o = run(&["thetas", &model(dir.path(), "example-4.9")]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    let p = &v["profile"];
    assert!((num(&p["theta"][0]) - -3.1639).abs() < 1e-4);
    assert!((num(&p["theta_prime"][0]) - -12.6558).abs() < 1e-4);
    assert_eq!(num(&p["theta"][3]), f64::INFINITY);
    assert_eq!(num(&p["theta_prime"][2]), f64::NEG_INFINITY);
}

#[test]
fn classify_counterexample_regimes() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path());
    let v = json(&run(&["classify", &model(dir.path(), "remark-2-3")]));
    let pieces = v["regime"]["pieces"].as_array().unwrap();
    assert_eq!(pieces.len(), 2);
    assert_eq!(pieces[0]["regime"], "one");
    assert_eq!(num(&pieces[0]["from"]), 0.0);
    assert_eq!(num(&pieces[0]["to"]), 1.0);
    assert_eq!(pieces[0]["to_inclusive"], true);
    assert_eq!(pieces[1]["regime"], "strictly-between");
    assert_eq!(num(&pieces[1]["to"]), f64::INFINITY);
    assert_eq!(v["regime"]["theorem"], "convergent-upper-bound");
}

#[test]
fn bounds_serialises_intervals() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path());
    let v = json(&run(&["bounds", &model(dir.path(), "example-4.8")]));
    let u = &v["report"]["U"];
    assert_eq!(u["kind"], "left-ray");
    assert_eq!(u["a"], "-inf");
    assert!((num(&u["b"]) - 8.0 / ((-1.0f64).exp() - 1.0)).abs() < 1e-12);
    assert_eq!(v["report"]["L"]["kind"], "empty");
}

#[test]
fn simulate_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path());
    let csv = dir.path().join("paths.csv");
    let o = run(&[
        "simulate",
        &model(dir.path(), "remark-2-3"),
        "--z",
        "2",
        "--paths",
        "300",
        "--horizon",
        "20",
        "--seed",
        "7",
        "--out-csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    let ruined = v["ruin"]["ruined"].as_u64().unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("ruin_time,min,max,terminal_v,terminal_z"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 300);
    let na = rows.iter().filter(|r| r.starts_with("NA,")).count() as u64;
    assert_eq!(300 - na, ruined);
}

#[test]
fn euler_flag_is_reported_biased_low() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path());
    let o = run(&[
        "simulate",
        &model(dir.path(), "example-4.1-dxi-1"),
        "--z",
        "1",
        "--paths",
        "50",
        "--dt",
        "0.01",
        "--horizon",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["ruin"]["biased_low"], true);
    assert_eq!(v["config"]["scheme"]["kind"], "euler-maruyama");
}

#[test]
fn malformed_model_exits_one_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\n  \"drift\": {\"xi\": 1,, \"eta\": 0}\n}\n").unwrap();
    let o = run(&["bounds", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_field_exits_one_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"drift":{"xi":1,"eta":1},"jumps":[{"rate":-1,"x":1,"y":1}]}"#).unwrap();
    let o = run(&["classify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("jumps[0]"));
}

#[test]
fn gaussian_model_needs_step_size() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path());
    let o = run(&["simulate", &model(dir.path(), "example-4.2"), "--z", "1"]);
    assert_eq!(o.status.code(), Some(1));
}
