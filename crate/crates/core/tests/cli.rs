use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn invlap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invlap")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

/// Data rows of a CSV table, skipping `#` lines and the column header.
fn rows(text: &str) -> Vec<Vec<String>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn solve_constant_data_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let pts = write(&dir, "pts.txt", "# x\n0.5 0 0\n0 0 0\n");
    let o = invlap(&["solve", "--n", "3", "--theta", "1", "--boundary", "constant", "--points", &pts]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("# seed: 20240601"));
    assert!(text.contains("\"n\":3"));
    let r = rows(&text);
    // (3 + r²)/4
    let u: f64 = r[0][4].parse().unwrap();
    assert!((u - 0.8125).abs() < 1e-12, "{u}");
    // u(0) = c_{3,1} = 3/4
    let u0: f64 = r[1][4].parse().unwrap();
    assert!((u0 - 0.75).abs() < 1e-12);
    assert_eq!(r[0][6], "ok");
}

#[test]
fn solve_reports_out_of_ball_rows() {
    let dir = TempDir::new().unwrap();
    let pts = write(&dir, "pts.txt", "0.1 0.2\n1.0 0\n0.3 0.3\n");
    let o = invlap(&["solve", "--n", "2", "--theta", "0.5", "--boundary", "coordinate", "--points", &pts]);
    assert_eq!(code(&o), 1);
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 3);
    assert_eq!(r[0][5], "ok");
    assert!(r[1][5].contains("point 1 is not strictly inside"), "{:?}", r[1]);
    assert!(r[1][3].is_empty());
    assert_eq!(r[2][5], "ok");
}

#[test]
fn solve_coordinate_data_vanishes_at_center() {
    let dir = TempDir::new().unwrap();
    let pts = write(&dir, "pts.txt", "0 0 0 0\n");
    let o = invlap(&["solve", "--n", "4", "--theta", "1", "--boundary", "coordinate", "--points", &pts, "--format", "report"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rec: serde_json::Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    assert!(rec["u"].as_f64().unwrap().abs() < 1e-15);
    // ∇u(0) = (n + 2θ) c ∫ζ₁² e₁ = 6 c_{4,1} / 4 with c_{4,1} = Γ(3)Γ(2)/(Γ(2)Γ(3)) = 1
    assert!((rec["grad_norm"].as_f64().unwrap() - 1.5).abs() < 1e-12);
}

#[test]
fn solve_accepts_sampled_boundary_file() {
    let dir = TempDir::new().unwrap();
    let mut samples = String::from("# weight z1 z2 value\n");
    let m = 64;
    for k in 0..m {
        let a = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
        samples.push_str(&format!("{} {} {} {}\n", 1.0 / m as f64, a.cos(), a.sin(), a.cos()));
    }
    let data = write(&dir, "phi.txt", &samples);
    let pts = write(&dir, "pts.txt", "0.3 0.1\n");
    let o = invlap(&["solve", "--n", "2", "--theta", "0", "--boundary", &format!("file:{data}"), "--points", &pts]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // harmonic extension of ζ₁ is x₁
    let u: f64 = rows(&stdout(&o))[0][3].parse().unwrap();
    assert!((u - 0.3).abs() < 1e-12, "{u}");
}

#[test]
fn config_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.txt", "0.1 0.2 zz\n");
    let short = write(&dir, "short.txt", "0.1 0.2\n");
    for args in [
        vec!["verify", "--theta", "-0.6"],
        vec!["verify", "--n", "1"],
        vec!["verify", "--tol.nonsense=1"],
        vec!["verify", "--tol", "mass_identity=-1"],
        vec!["blowup", "--theta", "0.25"],
        vec!["blowup"],
        vec!["keylem", "--p", "1", "--q", "1"],
        vec!["scan", "--theta", "0.5", "--phi", "sine"],
        vec!["solve", "--n", "3", "--theta", "1", "--points", &bad],
        vec!["solve", "--n", "3", "--theta", "1", "--points", &short],
        vec!["solve", "--n", "3", "--theta", "1"],
        vec!["frobnicate"],
    ] {
        let o = invlap(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn tolerance_overrides_are_recorded() {
    let o = invlap(&["verify", "--n", "2", "--theta", "0.5", "--tol.mass_identity=1e-6", "--tol.pde_residual", "0.002"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let params = text.lines().find(|l| l.starts_with("# params:")).unwrap();
    assert!(params.contains("\"mass_identity\":1e-6"), "{params}");
    assert!(params.contains("\"pde_residual\":0.002"), "{params}");
    let mass = rows(&text).into_iter().find(|r| r[0] == "mass_identity").unwrap();
    assert_eq!(mass[4], "9.9999999999999995e-7");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "run.toml", "n = 3\ntheta = 0.5\nseed = 11\nformat = \"report\"\n[tol]\nmass_identity = 1e-5\n");
    let out = dir.path().join("out.jsonl");
    let o = invlap(&["verify", "--config", &cfg, "--theta", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["header"]["seed"], 11);
    assert_eq!(header["header"]["params"]["grid"], serde_json::json!([[3, 1.0]]));
    let first: serde_json::Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    assert_eq!(first["name"], "mass_identity");
    assert_eq!(first["tolerance"].as_f64(), Some(1e-5));

    let typo = write(&dir, "typo.toml", "thetta = 1\n");
    assert_eq!(code(&invlap(&["verify", "--config", &typo])), 2);
}

fn verify_to(path: &Path, jobs: &str) -> i32 {
    code(&invlap(&["verify", "--n", "4", "--seed", "5", "--jobs", jobs, "--out", path.to_str().unwrap()]))
}

#[test]
fn verify_reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert_eq!(verify_to(&a, "1"), verify_to(&b, "3"));
    let (a, b) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn blowup_and_keylem_tables() {
    let o = invlap(&["blowup", "--n", "2", "--theta", "-0.25"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("# passed: true"));
    let r = rows(&text);
    assert_eq!(r.len(), 9);
    let values: Vec<f64> = r.iter().map(|row| row[1].parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]));

    let o = invlap(&["keylem", "--n", "3", "--p", "1", "--q", "0", "--format", "report"]);
    assert_eq!(code(&o), 0);
    let rec: serde_json::Value = serde_json::from_str(stdout(&o).lines().nth(1).unwrap()).unwrap();
    let slope = rec["observed"].as_f64().unwrap();
    assert!((slope - 1.0).abs() < 0.05, "{slope}");
    assert_eq!(rec["fit"]["radii"].as_array().unwrap().len(), 7);
}

#[test]
fn scan_tables() {
    let o = invlap(&["scan", "--n", "3", "--theta", "0.5", "--phi", "coordinate"]);
    assert_eq!(code(&o), 0);
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 7);
    // radius, nine directions, sup
    assert_eq!(r[0].len(), 11);

    // hyperbolic case: P[1] is constant
    let o = invlap(&["scan", "--n", "4", "--theta", "1", "--phi", "constant"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("# slope: 0.0000000000000000e0"));

    // θ < 0 reports the blow-up slope without a boundedness verdict
    let o = invlap(&["scan", "--n", "2", "--theta", "-0.25", "--phi", "constant", "--format", "report"]);
    assert_eq!(code(&o), 0);
    let rec: serde_json::Value = serde_json::from_str(stdout(&o).lines().nth(1).unwrap()).unwrap();
    assert_eq!(rec["comparison"], "skipped");
    assert!(rec["observed"].as_f64().unwrap() < -0.4);
}
