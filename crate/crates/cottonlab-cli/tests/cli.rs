use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cottonlab::charges::{self, BoundarySpace};
use cottonlab::conformal3d::{cotton, einstein, gauge_diffeo, gauge_weyl, space, sym};
use cottonlab::exact::{parse_poly, Poly};
use cottonlab::io;
use cottonlab::tensor::TensorField;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cottonlab")).args(args).env_remove("COTTONLAB_MAX_DEGREE").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(s: &str) -> Poly {
    parse_poly(s, &space()).unwrap()
}

fn write_field(dir: &Path, name: &str, f: &TensorField) -> String {
    let path = dir.join(name);
    fs::write(&path, io::field_to_string(f)).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn cotton_suite_at_spin_three() {
    let o = run(&["verify", "cotton", "--spin", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 5);
    assert!(out.contains("5 checks, 5 passed, 0 failed"));
}

#[test]
fn prepotential_suite_at_spin_four() {
    let o = run(&["verify", "prepotential", "--spin", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["records"][0]["id"], "prepotential-identity/s4/general");
    assert_eq!(v["records"][0]["pass"], true);
    assert_eq!(v["summary"]["failed"], 0);
}

#[test]
fn charges_suite() {
    let o = run(&["verify", "charges", "--spin", "3", "--bdim", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("PASS charges/s3-n3/killing-dim"));
    assert!(out.contains("PASS charges/s3-n3/conservation"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "cotton", "--spin", "7"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "cotton", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "killing", "--rank", "1"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_cottonlab"))
        .args(["verify", "tsd-residual", "--degree", "2"])
        .env("COTTONLAB_MAX_DEGREE", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let args = ["verify", "preimage-roundtrip", "--instances", "3", "--seed", "7", "--format", "json", "--no-timing"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let other = run(&["verify", "preimage-roundtrip", "--instances", "3", "--seed", "8", "--format", "json", "--no-timing"]);
    assert_eq!(stdout(&other).lines().filter(|l| l.contains("\"id\"")).count(), 9);
}

#[test]
fn report_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = run(&["verify", "schouten-coefficients", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["summary"]["passed"], 3);
}

#[test]
fn solve_killing_basis() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.json");
    let o = run(&["solve", "killing", "--rank", "2", "--bdim", "3", "--degree", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (shape, _, basis) = io::parse_basis(&fs::read_to_string(path).unwrap()).unwrap();
    let sp = BoundarySpace::new(3).unwrap();
    assert_eq!(shape, sp.sym(2));
    assert_eq!(basis.len(), 35);
    for chi in &basis {
        assert!(charges::is_killing(chi, &sp).unwrap());
    }
}

#[test]
fn solve_current_basis() {
    let o = run(&["solve", "current", "--rank", "2", "--bdim", "3", "--degree", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let (_, _, basis) = io::parse_basis(&stdout(&o)).unwrap();
    assert_eq!(basis.len(), 5);
}

#[test]
fn solve_preimages() {
    let dir = tempfile::tempdir().unwrap();
    let h0 = TensorField::from_fn(sym(2), space(), |i| match i {
        [0, 1] => p("x3^4*x2"),
        [2, 2] => p("x1^2*x2^3"),
        _ => p("0"),
    });
    let b = cotton(2).unwrap().apply(&h0).unwrap();
    let input = write_field(dir.path(), "b.json", &b);
    let o = run(&["solve", "cotton-preimage", "--in", &input]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let h = io::parse_field(&stdout(&o)).unwrap();
    assert_eq!(cotton(2).unwrap().apply(&h).unwrap(), b);

    let pi = einstein(2).unwrap().apply(&h0).unwrap();
    let input = write_field(dir.path(), "pi.json", &pi);
    let o = run(&["solve", "einstein-preimage", "--in", &input]);
    assert_eq!(o.status.code(), Some(0));
    let pp = io::parse_field(&stdout(&o)).unwrap();
    assert_eq!(einstein(2).unwrap().apply(&pp).unwrap(), pi);
}

#[test]
fn solve_decompose() {
    let dir = tempfile::tempdir().unwrap();
    let xi = TensorField::from_fn(sym(1), space(), |i| p(["x2*x3", "x1^2", "x3"][i[0] as usize]));
    let lam = TensorField::from_fn(sym(0), space(), |_| p("x1*x2 - 4"));
    let h = gauge_diffeo(2).unwrap().apply(&xi).unwrap().add(&gauge_weyl(2).unwrap().apply(&lam).unwrap()).unwrap();
    let input = write_field(dir.path(), "h.json", &h);
    let o = run(&["solve", "decompose", "--in", &input]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let x = io::parse_field(&v["xi"].to_string()).unwrap();
    let l = io::parse_field(&v["lambda"].to_string()).unwrap();
    let back = gauge_diffeo(2).unwrap().apply(&x).unwrap().add(&gauge_weyl(2).unwrap().apply(&l).unwrap()).unwrap();
    assert_eq!(back, h);
}

#[test]
fn bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    fs::write(&junk, "{ \"dim\": 3, ").unwrap();
    let o = run(&["solve", "cotton-preimage", "--in", junk.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["solve", "cotton-preimage", "--in", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    // a field that is not transverse has no Cotton preimage
    let not_tt = TensorField::from_fn(sym(2), space(), |i| if i == [0, 0] { p("x1") } else { p("0") });
    let input = write_field(dir.path(), "bad.json", &not_tt);
    let o = run(&["solve", "cotton-preimage", "--in", &input]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("precondition"));
}
