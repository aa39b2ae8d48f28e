use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).to_string_lossy().into_owned()
}

fn minsurf4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minsurf4")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = minsurf4(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn verify_main_equality_config() {
    let (code, r) = report(&["verify-main", "--config", &data("equality.toml")]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"], "equality");
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["result"]["lhs"], "1");
}

#[test]
fn verify_main_rejects_empty_factor_list() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[domain]\npunctures = [\"1\"]\n[metric]\nomega_hat = \"1/(z-1)\"\n");
    let out = minsurf4(&["verify-main", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("factors"));
}

#[test]
fn verify_main_incomplete_metric() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[domain]\npunctures = [\"1\", \"2\", \"3\", \"4\"]\n[metric]\nomega_hat = \"1/((z-1)(z-2)(z-3)(z-4))\"\n\
         [[metric.factors]]\ng = \"z\"\nm = 1\n",
    );
    let (code, r) = report(&["verify-main", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"], "hypothesis-failed");
}

#[test]
fn gen_example_cases() {
    let (code, r) = report(&["gen-example", "-p", "4", "-m", "1,1"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["lhs"], "1");
    assert_eq!(r["result"]["completeness"]["overall"], true);
    for f in r["result"]["factors"].as_array().unwrap() {
        assert_eq!(f["q"], 4);
    }
    let (_, r) = report(&["gen-example", "-p", "5", "-m", "1,1"]);
    assert_eq!(r["result"]["completeness"]["overall"], false);
    let (_, r) = report(&["gen-example", "-p", "4", "-m", "2"]);
    assert_eq!(r["verdict"], "equality");
    assert_eq!(r["result"]["factors"][0]["q"], 4);
    assert_eq!(minsurf4(&["gen-example", "-p", "1", "-m", "1"]).status.code(), Some(1));
}

#[test]
fn gen_example_writes_a_config_that_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(minsurf4(&["--out", out, "gen-example", "-p", "6", "-m", "1,3"]).status.code(), Some(0));
    let cfg = dir.path().join("gen-example.toml");
    let (code, r) = report(&["verify-main", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"], "equality");
}

#[test]
fn falsify_needs_a_seed_and_writes_rows() {
    assert_eq!(minsurf4(&["falsify", "-n", "3"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let st = minsurf4(&["--out", out, "--seed", "3", "--format", "csv", "falsify", "-n", "20"]);
    assert_eq!(st.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("falsify.csv")).unwrap();
    assert!(csv.starts_with("instance,seed,p,m,q,lhs,complete,applicable,holds,verdict\n"));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("falsify.json")).unwrap()).unwrap();
    assert_eq!(r["result"]["counterexamples"], 0);
    assert_eq!(r["result"]["complete"], 20);
    assert_eq!(r["seed"], 3);
}

#[test]
fn lagrangian_reports_curvature_at_origin() {
    let (code, r) = report(&["lagrangian", "--config", &data("lagrangian.toml")]);
    assert_eq!(code, 0);
    let s0 = &r["result"]["samples"][0];
    assert_eq!(s0["z"], "0");
    assert_eq!(s0["curvature"], -2.0);
    assert_eq!(s0["agrees"], true);
    assert!((r["result"]["beta"].as_f64().unwrap() - std::f64::consts::PI / 3.0).abs() < 1e-15);
}

#[test]
fn lagrangian_refuses_poles_in_domain() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[lagrangian]\nf1 = \"1/z\"\nf2 = \"z\"\nbeta_over_pi = 0\nsamples = [\"1\"]\n");
    assert_eq!(minsurf4(&["lagrangian", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn catenoid_mesh_is_finite_and_stable() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let out = minsurf4(&["--out", d.path().to_str().unwrap(), "mesh", "--config", &data("catenoid.toml")]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(a.path().join("mesh.obj")).unwrap();
    assert_eq!(text, std::fs::read_to_string(b.path().join("mesh.obj")).unwrap());
    let mesh = minsurf4::mesh::Mesh::parse(&text).unwrap();
    assert!(!mesh.vertices.is_empty());
    assert!(mesh.vertices.iter().flatten().all(|x| x.is_finite()));
}

#[test]
fn nonorientable_without_conformality_skips_the_stage() {
    let (code, r) = report(&["nonorientable", "--config", &data("moebius.toml"), "--no-conformality"]);
    assert_eq!(code, 0);
    let stages: Vec<&str> = r["result"]["report"]["stages"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    assert!(!stages.contains(&"conformality"));
    assert_eq!(r["result"]["report"]["conformal"], Value::Null);
    assert_eq!(r["verdict"], "equality");
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(minsurf4(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(minsurf4(&["--help"]).status.code(), Some(0));
}
