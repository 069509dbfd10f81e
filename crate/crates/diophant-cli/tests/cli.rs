//! End-to-end runs of the `approx` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_approx"))
        .args(args)
        .env_remove("APPROX_PRECISION_CAP")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

fn decimal(v: &Value) -> f64 {
    v.as_str().expect("decimal string").parse().expect("number")
}

const SQRT2: &str = "surd:(0+sqrt(2))/1";

#[test]
fn threedist_verifies() {
    let out = run(&["threedist", "--xi", SQRT2, "--q", "137", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["matches"], Value::Bool(true));
    assert_eq!(v["manifest"]["argv"][0], "threedist");
}

#[test]
fn witness_bound() {
    let out = run(&["uniform", "witness", "--xi", SQRT2, "--abrs", "2,2,1,1", "--psi", "1,1,0", "--q", "5000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(decimal(&v["result"]["bound_value"]["hi"]) <= 1024.0);
    assert!(v["result"]["checks"].as_object().unwrap().values().all(|b| b == &Value::Bool(true)));
}

#[test]
fn exit_codes() {
    let bad = run(&["uniform", "witness", "--xi", SQRT2, "--abrs", "2,2,5,1", "--q", "50"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("0 <= r < a"));
    assert_eq!(run(&["threedist", "--xi", "digits:0;1,2", "--q", "50"]).status.code(), Some(4));
    assert_eq!(
        run(&["--precision-cap", "24", "threedist", "--xi", SQRT2, "--q", "100000"]).status.code(),
        Some(3)
    );
    let env = Command::new(env!("CARGO_BIN_EXE_approx"))
        .args(["threedist", "--xi", SQRT2, "--q", "100000"])
        .env("APPROX_PRECISION_CAP", "24")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(3));
    assert_eq!(run(&["threedist", "--xi", SQRT2, "--q", "5", "--bogus"]).status.code(), Some(2));
}

#[test]
fn render_is_deterministic() {
    let args = ["orchard", "render", "--abrs", "2,2,1,1", "--depth", "30", "--slopes", "1.4142135,-0.5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let svg = String::from_utf8(a.stdout).unwrap();
    let trees = svg.split("<g class=\"trees\"").nth(1).unwrap().split("</g>").next().unwrap();
    assert_eq!(trees.matches("<circle").count(), 450);
    assert_eq!(svg.matches("<line").count(), 2);
}

#[test]
fn orchard_queries() {
    let v = json(&run(&[
        "orchard", "view", "--abrs", "2,2,1,1", "--depth", "10000", "--glade", "5", "--mode", "vertical", "--slope", "rat:2/3",
    ]));
    assert_eq!(v["result"]["visibility"]["verdict"], "Visible");
    let p = json(&run(&["orchard", "polya", "--n", "10"]));
    assert_eq!(p["result"]["blocked"], 100);
    let m = json(&run(&[
        "orchard",
        "minradius",
        "--abrs",
        "3,1,1,0",
        "--model",
        "uniform:1/2",
        "--depth",
        "50",
        "--slope",
        "rat:0/1",
    ]));
    assert_eq!(decimal(&m["result"]["min_blocking_radius"]["lo"]), 1.0);
}

#[test]
fn sums_tables() {
    let out = run(&["sums", "totient", "--u", "1", "--v", "0", "--q", "100,1000"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "Q,exact,main_term,error,constant");
    assert!(lines[1].starts_with("100,3044,"));
    let out = run(&["sums", "coprime", "--x", "1000", "--a", "2", "--r", "1", "--qmax", "6", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["result"][3]["q"], "4");
    assert_eq!(v["result"][3]["exact"], "500");
    let out = run(&["sums", "regcount", "--abrs", "2,2,1,1", "--q", "200"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("200,3072,"));
}

#[test]
fn metric_runs_repeat() {
    let args = [
        "metric",
        "khintchine",
        "--abrs",
        "2,2,1,1",
        "--psi",
        "1/2,2,0",
        "--samples",
        "300",
        "--seed",
        "7",
    ];
    let a = json(&run(&args));
    let b = json(&run(&args));
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["result"]["fractions"].as_array().unwrap().len(), 14);
    let csv = run(&[
        "metric",
        "uniform",
        "--abrs",
        "2,2,1,1",
        "--psi",
        "1,1,0",
        "--qgrid",
        "100,1000",
        "--samples",
        "100",
        "--csv",
    ]);
    assert!(String::from_utf8(csv.stdout).unwrap().starts_with("Q,survival,std_error\n100,"));
    let bb = json(&run(&["metric", "bb", "--samples", "100"]));
    assert_eq!(bb["result"]["undecided"], 0);
}

#[test]
fn acceptance_suite() {
    let out = run(&["accept", "cf"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["pass"], Value::Bool(true));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[PASS] criterion  1"));
}
