//! The `example` command: fixed experiment configurations that emit a
//! `table.json` with the quantities of the corresponding published table or
//! figure.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use polyinv::analysis::{rel_inverse_error_with, InverseErrorMethod};
use polyinv::composite::{apply_double, build_double, build_single};
use polyinv::deflation::{deflated_multirhs, DeflationOptions};
use polyinv::krylov::{bicg_poly, gmres_restarted, SolveReport};
use polyinv::linalg::SparseMatrix;
use polyinv::matrices::{self, gen_rhs, RhsKind, RhsSpec};
use polyinv::multirhs::{
    solve_each_bicgstab, solve_multirhs_bicg, solve_multirhs_double_poly, solve_multirhs_gmres_poly,
    MultiRhsOptions, MultiRhsReport,
};
use polyinv::poly::{apply_p, compute_pof, eval_scalar, leja_order, stabilize, RootPolynomial, StabilizeParams, Stabilization};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::output::write_json;

/// Example ids with a fixed configuration.
pub const SUPPORTED: [u32; 8] = [1, 3, 4, 5, 8, 9, 11, 12];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// Reduced sizes and sweeps that finish in minutes.
    Desk,
    /// Published sizes where they fit in memory.
    Full,
}

/// Settings shared by all examples.
#[derive(Debug, Clone)]
pub struct ExampleArgs {
    pub scale: Scale,
    pub seed: u64,
    pub threads: usize,
    /// Matrix Market file, required by example 8.
    pub mtx: Option<PathBuf>,
}

/// Rows keyed by column name; `columns` fixes the display order.
#[derive(Debug, Clone, Serialize)]
pub struct ExampleTable {
    pub example: u32,
    pub scale: Scale,
    pub seed: u64,
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Value>,
    pub notes: Vec<String>,
}

impl ExampleTable {
    fn new(example: u32, args: &ExampleArgs, title: &str, columns: &[&str]) -> Self {
        ExampleTable {
            example,
            scale: args.scale,
            seed: args.seed,
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Prints the table as aligned text.
    pub fn render(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| self.columns.iter().map(|c| cell(&r[c])).collect())
            .collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(j, c)| cells.iter().map(|r| r[j].len()).chain([c.len()]).max().unwrap_or(0))
            .collect();
        let line = |vals: Vec<&str>| -> String {
            vals.iter()
                .zip(&widths)
                .map(|(v, w)| format!("{v:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut out = format!("Example {}: {}\n", self.example, self.title);
        out.push_str(&line(self.columns.iter().map(String::as_str).collect()));
        out.push('\n');
        for r in &cells {
            out.push_str(&line(r.iter().map(String::as_str).collect()));
            out.push('\n');
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e5) {
                format!("{x:.2e}")
            } else {
                format!("{x:.4}")
            }
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Runs example `id` and writes `table.json` into `out`.
pub fn cmd_example(id: u32, args: &ExampleArgs, out: &Path) -> CliResult<ExampleTable> {
    let table = run_example(id, args)?;
    write_json(&out.join("table.json"), &table)?;
    Ok(table)
}

pub fn run_example(id: u32, args: &ExampleArgs) -> CliResult<ExampleTable> {
    match id {
        1 => example_1(args),
        3 => example_3(args),
        4 => example_4(args),
        5 => example_5(args),
        8 => example_8(args),
        9 => example_9(args),
        11 => example_11(args),
        12 => example_12(args),
        2 => Err(CliError::Config(
            "example 2 is a statistical figure over many random right-hand sides; reproduce it with repeated \
             `polyinv solve --gen convdiff2d:50,2,0,0 --method gmres --seed S` runs"
                .into(),
        )),
        other => Err(CliError::Config(format!(
            "example {other} is not supported (supported: {SUPPORTED:?}); use `polyinv solve` sweeps for other setups"
        ))),
    }
}

fn rhs(n: usize, count: usize, seed: u64) -> CliResult<Vec<Vec<f64>>> {
    Ok(gen_rhs(
        n,
        &RhsSpec {
            kind: RhsKind::NormalUnit,
            seed,
            count,
        },
    )?)
}

fn opts(rtol: f64, max_it: usize, stabilization: Stabilization, args: &ExampleArgs) -> MultiRhsOptions {
    MultiRhsOptions {
        rtol,
        max_it,
        stabilization,
        stabilize: StabilizeParams {
            seed: args.seed,
            ..StabilizeParams::default()
        },
        threads: args.threads,
    }
}

/// `exp(mean(ln r))`.
fn log_average(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, count) = values.into_iter().fold((0.0, 0usize), |(s, c), v| (s + v.ln(), c + 1));
    (sum / count.max(1) as f64).exp()
}

fn error_row(label: (&str, Value), e: impl std::fmt::Display) -> Value {
    json!({ label.0: label.1, "error": e.to_string() })
}

fn inverse_method(args: &ExampleArgs) -> InverseErrorMethod {
    match args.scale {
        Scale::Desk => InverseErrorMethod::Randomized {
            steps: 25,
            seed: args.seed,
        },
        Scale::Full => InverseErrorMethod::Dense,
    }
}

fn single_poly(report: &SolveReport<f64>, mode: Stabilization, args: &ExampleArgs) -> CliResult<RootPolynomial> {
    let base = leja_order(&report.roots, true)?;
    Ok(stabilize(
        &base,
        mode,
        &StabilizeParams {
            seed: args.seed,
            ..StabilizeParams::default()
        },
    ))
}

fn multirhs_row(label: &str, rep: &MultiRhsReport<f64>) -> Value {
    let extra = rep.systems.iter().skip(1).map(|s| s.relative_residual);
    json!({
        "method": label,
        "degree": rep.degree,
        "roots_added": rep.added_roots,
        "first_iterations": rep.history.len().saturating_sub(1),
        "first_residual": rep.systems[0].relative_residual,
        "max_extra_residual": rep.max_extra_residual(),
        "log_avg_residual": log_average(extra),
        "total_matvecs": rep.total_matvecs(),
        "stored_basis_vectors": rep.stored_basis_vectors,
    })
}

fn example_1(args: &ExampleArgs) -> CliResult<ExampleTable> {
    let a = matrices::gen_convdiff_2d(50, 2.0, 0.0, 0.0)?;
    let b = rhs(a.n_rows(), 1, args.seed)?.remove(0);
    let params = StabilizeParams::default();
    let full = build_single(&a, &b, 1e-12, 600, Stabilization::None, &params)?;
    let k_final = full.report.iterations;
    let mut ks: Vec<usize> = match args.scale {
        Scale::Desk => vec![50, 100, 150, 175, 200],
        Scale::Full => (1..).map(|i| 10 * i).take_while(|&k| k < k_final).collect(),
    };
    ks.retain(|&k| k < k_final);
    ks.push(k_final);
    let mut t = ExampleTable::new(
        1,
        args,
        "GMRES residual and accuracy of p(A) as an approximate inverse (convection-diffusion, n = 2500)",
        &["k", "relative_residual", "rel_inverse_error", "estimated"],
    );
    for k in ks {
        let build = if k == k_final {
            full.poly.clone()
        } else {
            build_single(&a, &b, 1e-12, k, Stabilization::None, &params)?.poly
        };
        let residual = if k == k_final {
            full.report.relative_residual()
        } else {
            full.report.history[k] / full.report.history[0]
        };
        let method = if k == k_final { InverseErrorMethod::Dense } else { inverse_method(args) };
        let err = rel_inverse_error_with(&a, &|v: &[f64]| apply_p(&build, &a, v), method)?;
        t.rows.push(json!({
            "k": k,
            "relative_residual": residual,
            "rel_inverse_error": err.relative,
            "estimated": err.estimated,
        }));
    }
    t.notes.push("grid_n = 50 interior points per direction (n = 2500); no stability roots added".into());
    t.notes.push("estimated = true marks power-iteration lower estimates of the norms".into());
    Ok(t)
}

fn example_3(args: &ExampleArgs) -> CliResult<ExampleTable> {
    let count = match args.scale {
        Scale::Desk => 5,
        Scale::Full => 20,
    };
    let mut t = ExampleTable::new(
        3,
        args,
        "Degree for residual 1e-10 and accuracy of p(A) versus conditioning (diagonal, n = 2501)",
        &["p", "condition", "degree", "roots_added", "rel_inverse_error"],
    );
    let b = rhs(2501, 1, args.seed)?.remove(0);
    for i in 0..count {
        let p = 0.55 + (1.8 - 0.55) * i as f64 / (count - 1) as f64;
        let a = matrices::gen_powerlaw_diag(p)?;
        let diag = a.diagonal();
        let build = match build_single(&a, &b, 1e-10, 2501, Stabilization::Updating, &StabilizeParams::default()) {
            Ok(b) => b,
            Err(e) => {
                t.rows.push(error_row(("p", json!(p)), e));
                continue;
            }
        };
        // A is diagonal, so both norms are maxima over the eigenvalues.
        let (mut err, mut inv) = (0.0f64, 0.0f64);
        for &l in &diag {
            let (_, pl, _) = eval_scalar(&build.poly, Complex64::new(l, 0.0));
            err = err.max((pl - 1.0 / l).norm());
            inv = inv.max(1.0 / l.abs());
        }
        let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &l| (lo.min(l.abs()), hi.max(l.abs())));
        t.rows.push(json!({
            "p": p,
            "condition": hi / lo,
            "degree": build.poly.degree_p(),
            "roots_added": build.poly.added_count(),
            "rel_inverse_error": err / inv,
        }));
    }
    Ok(t)
}

fn example_4(args: &ExampleArgs) -> CliResult<ExampleTable> {
    let a = matrices::gen_convdiff_2d(50, 2.0, 0.0, 0.0)?;
    let b = rhs(a.n_rows(), 1, args.seed)?.remove(0);
    let rtol = 1e-10;
    let mode = Stabilization::Updating;
    let params = StabilizeParams {
        seed: args.seed,
        ..StabilizeParams::default()
    };
    let method = inverse_method(args);
    let mut t = ExampleTable::new(
        4,
        args,
        "Four ways to build p(A) for the convection-diffusion matrix (n = 2500)",
        &["method", "iterations", "matvecs", "degree", "relative_residual", "rel_inverse_error"],
    );
    let row = |name: &str, rep: &SolveReport<f64>, degree: usize, err: f64| {
        json!({
            "method": name,
            "iterations": rep.iterations,
            "matvecs": rep.matvecs,
            "degree": degree,
            "relative_residual": rep.relative_residual(),
            "rel_inverse_error": err,
        })
    };

    match build_single(&a, &b, rtol, 600, mode, &params) {
        Ok(g) => {
            let e = rel_inverse_error_with(&a, &|v: &[f64]| apply_p(&g.poly, &a, v), method)?;
            t.rows.push(row("gmres", &g.report, g.poly.degree_p(), e.relative));
        }
        Err(e) => t.rows.push(error_row(("method", json!("gmres")), e)),
    }
    match gmres_restarted(&a, &b, 50, rtol, 400).map_err(CliError::from).and_then(|r| {
        let p = single_poly(&r, mode, args)?;
        Ok((r, p))
    }) {
        Ok((r, p)) => {
            let e = rel_inverse_error_with(&a, &|v: &[f64]| apply_p(&p, &a, v), method)?;
            t.rows.push(row("gmres_restarted_50", &r, p.degree_p(), e.relative));
        }
        Err(e) => t.rows.push(error_row(("method", json!("gmres_restarted_50")), e)),
    }
    match build_double(&a, &b, 10, rtol, 600, mode, &params) {
        Ok(d) => {
            let e = rel_inverse_error_with(&a, &|v: &[f64]| apply_double(&d.poly, &a, v), method)?;
            t.rows.push(row("double_10", &d.report, d.poly.degree(), e.relative));
        }
        Err(e) => t.rows.push(error_row(("method", json!("double_10")), e)),
    }
    match bicg_poly(&a, &b, rtol, 2000).map_err(CliError::from).and_then(|r| {
        let p = single_poly(&r, mode, args)?;
        Ok((r, p))
    }) {
        Ok((r, p)) => {
            let e = rel_inverse_error_with(&a, &|v: &[f64]| apply_p(&p, &a, v), method)?;
            t.rows.push(row("bicg", &r, p.degree_p(), e.relative));
        }
        Err(e) => t.rows.push(error_row(("method", json!("bicg")), e)),
    }
    t.notes.push("matvecs of bicg count products with both A and its adjoint".into());
    Ok(t)
}

fn example_5(args: &ExampleArgs) -> CliResult<ExampleTable> {
    let (grid, bicgstab_it) = match args.scale {
        Scale::Desk => (100, 10_000),
        Scale::Full => (200, 100_000),
    };
    let a = matrices::gen_convdiff_2d(grid, 2.0, 0.0, 10.0)?;
    let b = rhs(a.n_rows(), 10, args.seed)?;
    let mut t = ExampleTable::new(
        5,
        args,
        "Ten right-hand sides for the indefinite convection-diffusion matrix",
        &[
            "method",
            "degree",
            "roots_added",
            "total_matvecs",
            "first_residual",
            "max_extra_residual",
            "systems_below_1e-8",
            "stored_basis_vectors",
        ],
    );
    let below = |rep: &MultiRhsReport<f64>| rep.systems.iter().filter(|s| s.relative_residual <= 1e-8).count();
    let mut push = |label: &str, rep: CliResult<MultiRhsReport<f64>>| match rep {
        Ok(rep) => {
            let mut row = multirhs_row(label, &rep);
            row["systems_below_1e-8"] = json!(below(&rep));
            t.rows.push(row);
        }
        Err(e) => t.rows.push(error_row(("method", json!(label)), e)),
    };
    let o = opts(1e-8, bicgstab_it, Stabilization::Updating, args);
    push("bicgstab", solve_each_bicgstab(&a, &b, &o).map_err(Into::into));
    let o = opts(1e-11, 3000, Stabilization::Updating, args);
    push("gmres_poly", solve_multirhs_gmres_poly(&a, &b, &o).map_err(Into::into));
    push("double_40", solve_multirhs_double_poly(&a, &b, 40, &o).map_err(Into::into));
    push("bicg", solve_multirhs_bicg(&a, &b, &o).map_err(Into::into));
    t.notes.push(format!("grid_n = {grid}, alpha = 2, gamma = 10, n = {}", a.n_rows()));
    t.notes.push("restarted GMRES(100) is omitted (a day-long run at full scale)".into());
    Ok(t)
}

fn example_8(args: &ExampleArgs) -> CliResult<ExampleTable> {
    let path = args
        .mtx
        .as_ref()
        .ok_or_else(|| CliError::Config("example 8 needs the BWM2000 matrix: pass --mtx path/to/bwm2000.mtx".into()))?;
    let a: SparseMatrix<f64> = match matrices::read_matrix_market(path)? {
        matrices::MatrixMarketData::Real(a) => a,
        matrices::MatrixMarketData::Complex(_) => {
            return Err(CliError::Config("example 8 expects a real matrix".into()))
        }
    };
    let b = rhs(a.n_rows(), 10, args.seed)?;
    let mut t = ExampleTable::new(
        8,
        args,
        "Deflated double polynomial versus BiCGStab, ten right-hand sides",
        &["method", "degree", "total_matvecs", "log_avg_residual", "max_residual", "basis_size"],
    );
    let dopts = DeflationOptions {
        d_phi_in: 50,
        nev: 30,
        rtol1: 1e-11,
        rtol2: 1e-9,
        rtol3: 1e-8,
        threads: args.threads,
        ..DeflationOptions::default()
    };
    match deflated_multirhs(&a, &b, &dopts) {
        Ok(run) => {
            let res: Vec<f64> = run.report.systems.iter().map(|s| s.relative_residual).collect();
            t.rows.push(json!({
                "method": "deflated_double_50",
                "degree": run.poly.degree(),
                "first_outer_iterations": run.first.outer.degree(),
                "total_matvecs": run.report.total_matvecs(),
                "log_avg_residual": log_average(res.iter().copied()),
                "max_residual": res.iter().copied().fold(0.0, f64::max),
                "basis_size": run.basis.as_ref().map_or(0, |b| b.size()),
            }));
        }
        Err(e) => t.rows.push(error_row(("method", json!("deflated_double_50")), e)),
    }
    let max_it = match args.scale {
        Scale::Desk => 20_000,
        Scale::Full => 100_000,
    };
    match solve_each_bicgstab(&a, &b, &opts(1e-8, max_it, Stabilization::None, args)) {
        Ok(rep) => {
            let res: Vec<f64> = rep.systems.iter().map(|s| s.relative_residual).collect();
            t.rows.push(json!({
                "method": "bicgstab",
                "degree": Value::Null,
                "total_matvecs": rep.total_matvecs(),
                "log_avg_residual": log_average(res.iter().copied()),
                "max_residual": res.iter().copied().fold(0.0, f64::max),
                "basis_size": 0,
            }));
        }
        Err(e) => t.rows.push(error_row(("method", json!("bicgstab")), e)),
    }
    Ok(t)
}

fn example_9(args: &ExampleArgs) -> CliResult<ExampleTable> {
    let mut t = ExampleTable::new(
        9,
        args,
        "Deflated double polynomial for the 1-D convection-diffusion matrix (n = 1000)",
        &[
            "alpha",
            "rtols_log10",
            "degree",
            "average_matvecs",
            "max_residual",
            "log_avg_residual",
            "max_applications",
            "bicgstab_average_matvecs",
            "bicgstab_log_avg_residual",
        ],
    );
    let bicgstab_it = match args.scale {
        Scale::Desk => 30_000,
        Scale::Full => 100_000,
    };
    let cases: [(f64, [f64; 3]); 4] = [
        (0.0, [1e-11, 1e-9, 1e-8]),
        (5.0, [1e-11, 1e-9, 1e-8]),
        (5.0, [1e-11, 1e-3, 1e-8]),
        (25.0, [1e-10, 1e-2, 1e-8]),
    ];
    let mut last_alpha = None;
    for (alpha, rtols) in cases {
        let a = matrices::gen_convdiff_1d(1000, alpha, 30.0)?;
        let b = rhs(1000, 10, args.seed)?;
        let dopts = DeflationOptions {
            d_phi_in: 25,
            nev: 30,
            rtol1: rtols[0],
            rtol2: rtols[1],
            rtol3: rtols[2],
            threads: args.threads,
            ..DeflationOptions::default()
        };
        let label = rtols.iter().map(|r| format!("{}", r.log10().round())).collect::<Vec<_>>().join(",");
        let mut row = match deflated_multirhs(&a, &b, &dopts) {
            Ok(run) => {
                let sys = &run.report.systems;
                json!({
                    "alpha": alpha,
                    "rtols_log10": label,
                    "degree": run.poly.degree(),
                    "average_matvecs": run.report.total_matvecs() as f64 / sys.len() as f64,
                    "max_residual": sys.iter().map(|s| s.relative_residual).fold(0.0, f64::max),
                    "log_avg_residual": log_average(sys.iter().skip(1).map(|s| s.relative_residual)),
                    "max_applications": sys.iter().map(|s| s.applications).max().unwrap_or(0),
                })
            }
            Err(e) => json!({ "alpha": alpha, "rtols_log10": label, "error": e.to_string() }),
        };
        // BiCGStab does not depend on the tolerances of the deflated method.
        if last_alpha != Some(alpha) {
            match solve_each_bicgstab(&a, &b, &opts(1e-8, bicgstab_it, Stabilization::None, args)) {
                Ok(rep) => {
                    row["bicgstab_average_matvecs"] = json!(rep.total_matvecs() as f64 / rep.systems.len() as f64);
                    row["bicgstab_log_avg_residual"] = json!(log_average(rep.systems.iter().map(|s| s.relative_residual)));
                }
                Err(e) => row["bicgstab_error"] = json!(e.to_string()),
            }
        }
        last_alpha = Some(alpha);
        t.rows.push(row);
    }
    t.notes.push("d_phi_in = 25, nev = 30; log_avg_residual is over systems 2..10".into());
    Ok(t)
}

fn example_11(args: &ExampleArgs) -> CliResult<ExampleTable> {
    let mut t = ExampleTable::new(
        11,
        args,
        "Stability control for bidiagonal matrices with outlying eigenvalues",
        &[
            "matrix",
            "degree",
            "max_pof",
            "max_residual_without",
            "roots_added_basic",
            "max_residual_basic",
            "roots_added_updating",
            "max_residual_updating",
        ],
    );
    for case in 1..=4u32 {
        let a = matrices::gen_bidiag_example11(case)?;
        let b = rhs(a.n_rows(), 10, args.seed)?;
        let without = solve_multirhs_gmres_poly(&a, &b, &opts(1e-11, 2500, Stabilization::None, args))?;
        let basic = solve_multirhs_gmres_poly(&a, &b, &opts(1e-11, 2500, Stabilization::Basic, args))?;
        let with = solve_multirhs_gmres_poly(&a, &b, &opts(1e-11, 2500, Stabilization::Updating, args))?;
        let poly: RootPolynomial = serde_json::from_value(without.polynomial.clone()).map_err(|e| CliError::Solver(e.into()))?;
        let max_pof = compute_pof(&poly).into_iter().fold(0.0, f64::max);
        t.rows.push(json!({
            "matrix": case,
            "degree": without.degree,
            "max_pof": max_pof,
            "max_residual_without": without.max_extra_residual(),
            "roots_added_basic": basic.added_roots,
            "max_residual_basic": basic.max_extra_residual(),
            "roots_added_updating": with.added_roots,
            "max_residual_updating": with.max_extra_residual(),
        }));
    }
    t.notes.push("rtol 1e-11, nine extra right-hand sides, pofcutoff 8".into());
    Ok(t)
}

fn example_12(args: &ExampleArgs) -> CliResult<ExampleTable> {
    let a = matrices::gen_gap_diag();
    let b = rhs(a.n_rows(), 10, args.seed)?;
    let mut t = ExampleTable::new(
        12,
        args,
        "Spectrum with four gaps: stability control variants and the double polynomial",
        &["method", "degree", "roots_added", "first_residual", "max_extra_residual"],
    );
    for (label, mode) in [
        ("gmres_none", Stabilization::None),
        ("gmres_basic", Stabilization::Basic),
        ("gmres_updating", Stabilization::Updating),
    ] {
        match solve_multirhs_gmres_poly(&a, &b, &opts(1e-11, 2500, mode, args)) {
            Ok(rep) => t.rows.push(multirhs_row(label, &rep)),
            Err(e) => t.rows.push(error_row(("method", json!(label)), e)),
        }
    }
    match solve_multirhs_double_poly(&a, &b, 10, &opts(1e-11, 2500, Stabilization::Updating, args)) {
        Ok(rep) => t.rows.push(multirhs_row("double_10", &rep)),
        Err(e) => t.rows.push(error_row(("method", json!("double_10")), e)),
    }
    t.notes.push("rtol 1e-11, nine extra right-hand sides, pofcutoff 8".into());
    Ok(t)
}

/// Wall-clock helper for progress lines on stderr.
pub fn timed<T>(label: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    eprintln!("{label}: {:.2} s", start.elapsed().as_secs_f64());
    out
}
