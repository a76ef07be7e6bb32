use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn polyinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyinv"))
        .args(args)
        .env_remove("POLYINV_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn invalid_generator_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = polyinv(&["solve", "--gen", "nosuchmatrix:3", "--out", path_str(dir.path())]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn unknown_suite_and_unsupported_example_exit_2() {
    assert_eq!(code(&polyinv(&["verify", "no_such_suite"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let out = polyinv(&["example", "2", "--out", path_str(dir.path())]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("solve"), "{}", stderr(&out));
}

#[test]
fn conflicting_matrix_sources_are_rejected() {
    let out = polyinv(&["solve", "--gen", "gapdiag", "--mtx", "a.mtx"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn missing_matrix_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.mtx");
    let out = polyinv(&["solve", "--mtx", path_str(&missing), "--out", path_str(dir.path())]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
}

#[test]
fn hritz_bound_sweep_holds() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("v.json");
    let out = polyinv(&["verify", "hritz_bound", "--trials", "50", "--out", path_str(&json)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = read_json(&json);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["inconclusive"], 0);
    assert_eq!(v["trials"], 50);
}

#[test]
fn interlacing_sweep_holds() {
    let out = polyinv(&["verify", "interlacing", "--trials", "100"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small run\ngen = convdiff2d:8,1,0,0\nrtol1 = 1e-4\nnrhs = 2\nmethod = gmres\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = polyinv(&["solve", "--config", path_str(&cfg), "--rtol", "1e-9", "--out", path_str(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = read_json(&out_dir.join("report.json"));
    assert_eq!(report["config"]["rtol1"], 1e-9);
    assert_eq!(report["config"]["nrhs"], 2);
    assert_eq!(report["n"], 64);
    assert!(report["report"]["systems"][0]["relative_residual"].as_f64().unwrap() <= 1e-9);
    let history = std::fs::read_to_string(out_dir.join("residual_history.csv")).unwrap();
    assert!(history.starts_with("iteration,residual,relative_residual\n"));
}

#[test]
fn generated_file_solves_like_the_generator() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = dir.path().join("a.mtx");
    let rhs = dir.path().join("b.mtx");
    let out = polyinv(&[
        "gen", "--gen", "convdiff2d:10,3,1,0", "--out", path_str(&mtx), "--nrhs", "2", "--rhs-out", path_str(&rhs),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let from_gen = dir.path().join("g");
    let from_file = dir.path().join("f");
    let a = polyinv(&["solve", "--gen", "convdiff2d:10,3,1,0", "--nrhs", "2", "--out", path_str(&from_gen)]);
    let b = polyinv(&[
        "solve", "--mtx", path_str(&mtx), "--rhs-file", path_str(&rhs), "--out", path_str(&from_file),
    ]);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(code(&b), 0, "{}", stderr(&b));
    for name in ["residual_history.csv", "poly.json"] {
        assert_eq!(
            std::fs::read(from_gen.join(name)).unwrap(),
            std::fs::read(from_file.join(name)).unwrap(),
            "{name} differs"
        );
    }
}

fn sample_at(poly: &Path, points: &[(f64, f64)], dir: &Path) -> Vec<Vec<f64>> {
    let pts = dir.join("points.txt");
    let text: String = points.iter().map(|(re, im)| format!("{re:.17e},{im:.17e}\n")).collect();
    std::fs::write(&pts, text).unwrap();
    let csv = dir.join("sample.csv");
    let out = polyinv(&["sample-poly", path_str(poly), "--points", path_str(&pts), "--out", path_str(&csv)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "z_re,z_im,pi_re,pi_im,p_re,p_im,phi_re,phi_im,inv_re,inv_im"
    );
    lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

#[test]
fn sampling_at_a_root_and_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = polyinv(&["solve", "--gen", "convdiff2d:6,0,0,0", "--rtol", "1e-8", "--out", path_str(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let poly = out_dir.join("poly.json");
    let stored = read_json(&poly);
    let root = &stored["polynomial"]["roots"][0];
    let theta = (root[0].as_f64().unwrap(), root[1].as_f64().unwrap());
    let rows = sample_at(&poly, &[theta, (0.0, 0.0)], dir.path());
    let at_root = &rows[0];
    assert!(at_root[2].abs() < 1e-10 && at_root[3].abs() < 1e-10, "π(θ) = {}", at_root[2]);
    let inv = 1.0 / theta.0;
    assert!((at_root[4] - inv).abs() < 1e-10 * inv.abs());
    let at_zero = &rows[1];
    assert_eq!((at_zero[2], at_zero[3]), (1.0, 0.0));
    assert_eq!((at_zero[6], at_zero[7]), (0.0, 0.0));
    assert!(at_zero[8].is_nan() && at_zero[9].is_nan());
}

#[test]
fn convection_diffusion_polynomial_at_k_175_is_accurate_at_all_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = polyinv(&[
        "solve", "--gen", "convdiff2d:50,2,0,0", "--rtol", "1.25e-9", "--max-it", "175", "--stabilization", "none",
        "--out", path_str(&out_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(read_json(&out_dir.join("poly.json"))["degree"], 174);
    // Eigenvalues of the separable operator: the x-direction factor carries
    // the convection through sqrt(east * west).
    let h = 1.0 / 51.0;
    let cx = (1.0 - (2.0 * h / 2.0f64).powi(2)).sqrt();
    let mut eigs = Vec::new();
    for j in 1..=50 {
        for k in 1..=50 {
            let t = std::f64::consts::PI * h;
            eigs.push((4.0 - 2.0 * cx * (j as f64 * t).cos() - 2.0 * (k as f64 * t).cos(), 0.0));
        }
    }
    let rows = sample_at(&out_dir.join("poly.json"), &eigs, dir.path());
    let worst = rows
        .iter()
        .map(|r| ((r[4] - r[8]).powi(2) + (r[5] - r[9]).powi(2)).sqrt() / r[8].hypot(r[9]))
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6, "max relative deviation from 1/λ: {worst:.2e}");
}

#[test]
fn gap_spectrum_double_polynomial_degree() {
    let dir = tempfile::tempdir().unwrap();
    let out = polyinv(&[
        "solve", "--gen", "gapdiag", "--method", "double", "--dphi-in", "10", "--rtol", "1e-11", "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let degree = read_json(&dir.path().join("poly.json"))["degree"].as_u64().unwrap();
    assert_eq!(degree % 10, 9);
    // Reported composite degree is 10 * 67 - 1 = 669.
    assert!((degree as f64 - 669.0).abs() <= 0.05 * 669.0, "degree {degree}");
}

#[test]
fn example_11_table_has_four_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = polyinv(&["example", "11", "--out", path_str(dir.path())]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let t = read_json(&dir.path().join("table.json"));
    let rows = t["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row["matrix"], i + 1);
        for key in ["roots_added_basic", "roots_added_updating", "max_residual_basic", "max_residual_updating"] {
            assert!(row.get(key).is_some(), "missing {key}");
        }
    }
    assert_eq!(rows[0]["roots_added_updating"], 0);
}
