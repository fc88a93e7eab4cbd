use std::process::{Command, Output};

use serde_json::Value;

fn annulus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_annulus")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn close(v: &Value, expected: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() - expected).abs() <= tol
}

#[test]
fn eval_of_a_monomial() {
    let out = annulus(&["eval", "--fn", "z^2", "--tau", "2", "--r", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(close(&v["T"], 6f64.ln(), 1e-12), "{v}");
    assert!(close(&v["N"], 0.0, 0.0));
    assert!(close(&v["c_f"], 1.0, 1e-12));
    assert_eq!(v["edge_pole"], false);
}

#[test]
fn eval_of_constants_and_poles() {
    let v = json(&annulus(&["eval", "--fn", "5", "--tau", "7", "--r", "7"]));
    assert!(close(&v["T"], 0.0, 1e-12), "{v}");
    let v = json(&annulus(&["eval", "--fn", "rational: 1; (2,-1)", "--tau", "3", "--r", "4"]));
    assert!(close(&v["N"], 2f64.ln(), 1e-12), "{v}");
}

#[test]
fn eval_as_csv() {
    let out = annulus(&["eval", "--fn", "z", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tau,r,N,m_annulus,c_f,T,quad_error,status"));
    assert!(lines.next().unwrap().ends_with(",ok"));
}

#[test]
fn syntax_errors_carry_the_offset() {
    let out = annulus(&["eval", "--fn", "z^^2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "syntax");
    assert_eq!(v["error"]["offset"], 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn exit_statuses() {
    assert_eq!(annulus(&["eval", "--fn", "z", "--tau", "0.5"]).status.code(), Some(1));
    assert_eq!(annulus(&["eval", "--fn", "z", "--bogus"]).status.code(), Some(1));
    assert_eq!(annulus(&["surface", "--fn", "z", "--tau-grid", "1:2"]).status.code(), Some(1));
    assert_eq!(annulus(&["eval", "--fn", "exp(z)", "--max-nodes", "8"]).status.code(), Some(2));
    assert_eq!(annulus(&["verify", "--fn", "z^5", "--suite", "lemma6"]).status.code(), Some(3));
    assert_eq!(annulus(&["--help"]).status.code(), Some(0));
}

#[test]
fn surface_rows_follow_the_grid() {
    let out = annulus(&["surface", "--fn", "z", "--tau-grid", "1:2:2", "--r-grid", "1:3:2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    let tau_r: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert_eq!(tau_r, [(1.0, 1.0), (1.0, 3.0), (2.0, 1.0), (2.0, 3.0)]);
    let t: f64 = rows[3][5].parse().unwrap();
    assert!((t - 0.5 * 6f64.ln()).abs() < 1e-12);
}

#[test]
fn surface_flags_poles_on_window_edges() {
    let out = annulus(&["surface", "--fn", "rational: 1; (2,-1)", "--tau-grid", "1:3:2", "--r-grid", "1:2:3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let statuses: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(statuses, ["ok", "ok", "edge_pole", "ok", "ok", "edge_pole"]);
}

#[test]
fn surface_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs: &str| {
        let path = dir.path().join(format!("s{jobs}.csv"));
        let out = annulus(&[
            "surface", "--fn", "z^3", "--tau-grid", "1:5:4", "--r-grid", "1:5:4", "--jobs", jobs, "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    let one = run("1");
    assert_eq!(one, run("8"));
    assert_eq!(String::from_utf8(one).unwrap().lines().count(), 17);
}

#[test]
fn verify_runs_every_suite() {
    let out = annulus(&[
        "verify", "--fn", "z^2", "--suite",
        "jensen1,jensen2,eq12,cartan,lemma4,lemma5,lemma6,fft,theorem1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let entries = json(&out);
    let entries = entries.as_array().unwrap();
    for suite in ["jensen1", "jensen2", "eq12", "cartan", "lemma4", "lemma5", "lemma6", "fft", "theorem1"] {
        assert!(entries.iter().any(|e| e["suite"] == suite), "{suite} missing");
    }
    assert!(entries.iter().all(|e| e["pass"] == true));
}

#[test]
fn verify_reports_unsupported_models_per_entry() {
    let out = annulus(&["verify", "--fn", "exp(z)", "--suite", "cartan"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v[0]["pass"], false);
    assert_eq!(v[0]["error"]["kind"], "unsupported");
}
