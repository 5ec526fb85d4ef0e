use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use prismatic::{complex, fixtures, DecoratedMetric, PolyhedralMetric, ResultDocument, SurfaceDocument};
use tempfile::TempDir;

fn prismatic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prismatic")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, doc: &SurfaceDocument) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, doc.to_json()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

fn result(out: &Output) -> ResultDocument {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    ResultDocument::parse(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

#[test]
fn realize_genus_two_flat() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "g2.json", &SurfaceDocument::from_metric(&fixtures::genus_two_metric(), None, None));
    let doc = result(&prismatic(&["realize", "--surface", s(&f), "--kappa-zero"]));
    assert!((doc.weights[0] - fixtures::genus_two_flat_weight()).abs() <= 1e-10);
    assert!(doc.edges.iter().all(|e| (e.theta - PI / 9.0).abs() <= 1e-9));
    assert!(doc.residual.unwrap() <= 1e-10);
    assert!(doc.trace.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn realize_writes_out_file_deterministically() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "in.json", &SurfaceDocument::from_metric(&fixtures::two_cusp_metric(), None, Some(&[0.5, -0.5])));
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        assert!(prismatic(&["realize", "--surface", s(&f), "--out", s(out)]).status.success());
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let doc = ResultDocument::parse(std::str::from_utf8(&ta).unwrap()).unwrap();
    assert_eq!(doc.to_json().as_bytes(), ta.as_slice());
}

#[test]
fn realize_recovers_weights_from_their_curvatures() {
    let m = fixtures::two_cusp_metric();
    // `--kappa` is read in the document's cusp numbering.
    assert_eq!(m.canonicalize().2, vec![0, 1]);
    let w = [0.4, -0.3];
    let kappa = complex::delaunayize(&m, &w).unwrap().state.kappa().to_vec();
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "in.json", &SurfaceDocument::from_metric(&m, None, None));
    let doc = result(&prismatic(&["realize", "--surface", s(&f), &format!("--kappa={}", list(&kappa))]));
    for (a, b) in doc.weights.iter().zip(w) {
        assert!((a - b).abs() <= 1e-8, "{:?}", doc.weights);
    }
}

#[test]
fn realize_rejects_boundary_target() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "g2.json", &SurfaceDocument::from_metric(&fixtures::genus_two_metric(), None, None));
    let out = prismatic(&["realize", "--surface", s(&f), &format!("--kappa={:?}", -4.0 * PI)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "infeasible");
    assert!(out.stdout.is_empty());
}

#[test]
fn realize_reports_non_convergence() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "in.json", &SurfaceDocument::from_metric(&fixtures::two_cusp_metric(), None, None));
    let out = prismatic(&["realize", "--surface", s(&f), "--kappa=-5.5,-5.5", "--max-iter", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "no_convergence");
    assert_eq!(err["trace"].as_array().unwrap().len(), 2);
}

#[test]
fn realize_without_target_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "g2.json", &SurfaceDocument::from_metric(&fixtures::genus_two_metric(), None, None));
    let out = prismatic(&["realize", "--surface", s(&f)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "usage");
}

fn lower_document(lengths: Vec<f64>) -> SurfaceDocument {
    let mut doc = SurfaceDocument::from_metric(&fixtures::genus_two_metric(), None, None);
    doc.edge_lengths = lengths;
    doc
}

#[test]
fn uniformize_fixed_point() {
    let a = 3.0f64.acosh();
    let doc = lower_document(vec![a; 9]);
    let kappa = doc.polyhedral().unwrap().curvatures();
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "lower.json", &doc);
    let out = result(&prismatic(&["uniformize", "--metric", s(&f), &format!("--kappa={}", list(&kappa))]));
    assert!(out.edges.iter().all(|e| (e.a - a).abs() <= 1e-10));
    assert!(out.cusps.iter().all(|c| c.u.unwrap().abs() <= 1e-10));
}

#[test]
fn uniformize_genus_two_to_flat() {
    let state = complex::assemble(&fixtures::genus_two_metric(), &[0.0]).unwrap();
    let lower: PolyhedralMetric = complex::lower_metric(&state).unwrap();
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "lower.json", &lower_document(lower.lengths().to_vec()));
    let out = result(&prismatic(&["uniformize", "--metric", s(&f), "--kappa-zero"]));
    let u = out.cusps[0].u.unwrap();
    assert!((u - fixtures::genus_two_flat_weight() / 2.0).abs() <= 1e-10);
    assert!(out.conformal_residual.unwrap() <= 1e-12);
    let flat = complex::assemble(&fixtures::genus_two_metric(), &[fixtures::genus_two_flat_weight()]).unwrap();
    let target = complex::lower_metric(&flat).unwrap();
    assert!(out.edges.iter().all(|e| (e.a - target.lengths()[0]).abs() <= 1e-10));
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn sorted_theta(doc: &ResultDocument) -> Vec<f64> {
    sorted(&doc.edges.iter().map(|e| e.theta).collect::<Vec<_>>())
}

#[test]
fn delaunay_is_path_independent() {
    let m = fixtures::two_cusp_metric();
    let mut flipped: DecoratedMetric = m.clone();
    for e in [0, 4, 7] {
        flipped = flipped.flip(e).unwrap();
    }
    let dir = TempDir::new().unwrap();
    // Each document numbers its cusps canonically, so the weights travel
    // inside the documents rather than on the command line.
    let w = [0.2, -0.1];
    let plain = write(&dir, "plain.json", &SurfaceDocument::from_metric(&m, Some(&w), None));
    let moved = write(&dir, "moved.json", &SurfaceDocument::from_metric(&flipped, Some(&w), None));
    let a = result(&prismatic(&["delaunay", "--surface", s(&plain)]));
    let b = result(&prismatic(&["delaunay", "--surface", s(&moved)]));
    assert!(a.edges.iter().all(|e| e.theta >= -1e-12));
    for (x, y) in sorted_theta(&a).iter().zip(sorted_theta(&b)) {
        assert!((x - y).abs() <= 1e-9);
    }
    let (ka, kb) = (sorted(&a.curvatures), sorted(&b.curvatures));
    assert!(ka.iter().zip(&kb).all(|(x, y)| (x - y).abs() <= 1e-9), "{ka:?} vs {kb:?}");

    // Feeding the result back in needs no flips.
    let again = write(&dir, "again.json", &a.surface);
    let c = result(&prismatic(&["delaunay", "--surface", s(&again)]));
    assert!(c.flip_log.is_empty());
}

#[test]
fn check_passes_on_genus_two() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "g2.json", &SurfaceDocument::from_metric(&fixtures::genus_two_metric(), None, None));
    let out = prismatic(&["check", "--surface", s(&f)]);
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{table}");
    for name in ["validate", "admissibility", "lorentz oracle", "hessian", "gauss-bonnet"] {
        assert!(table.lines().any(|l| l.starts_with("PASS") && l.contains(name)), "{table}");
    }
}

#[test]
fn check_names_fixed_point_gluing() {
    let mut doc = SurfaceDocument::from_metric(&fixtures::genus_two_metric(), None, None);
    doc.gluings[0][1] = doc.gluings[0][0];
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.json", &doc);
    let out = prismatic(&["check", "--surface", s(&f)]);
    assert_eq!(out.status.code(), Some(1));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.starts_with("FAIL  validate") && table.contains("[0, 0]"), "{table}");
}

#[test]
fn check_names_inadmissible_corner() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "in.json", &SurfaceDocument::from_metric(&fixtures::two_cusp_metric(), None, None));
    let out = prismatic(&["check", "--surface", s(&f), "--weights", "3,0"]);
    assert_eq!(out.status.code(), Some(1));
    let table = String::from_utf8(out.stdout).unwrap();
    let line = table.lines().find(|l| l.contains("admissibility")).unwrap();
    assert!(line.starts_with("FAIL") && line.contains("triangle 0 at corner 0"), "{table}");
}

#[test]
fn unreadable_input_is_reported() {
    let out = prismatic(&["realize", "--surface", "/nonexistent/surface.json", "--kappa-zero"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "io");
}
