//! The `solve` command.

use std::fmt::Write as _;
use std::path::Path;

use polyinv::deflation::{deflated_multirhs, DeflationOptions};
use polyinv::krylov::explicit_residual;
use polyinv::linalg::{vector, LinearOperator, RightPreconditioned, SparseMatrix};
use polyinv::matrices::{gen_rhs, read_matrix_market_columns, RhsSpec};
use polyinv::multirhs::{
    solve_each_bicgstab, solve_multirhs_bicg, solve_multirhs_double_poly, solve_multirhs_gmres_poly,
    solve_multirhs_restarted, MultiRhsOptions, MultiRhsReport,
};
use polyinv::poly::StabilizeParams;
use polyinv::precond::ilu0;
use polyinv::Scalar;
use serde_json::json;

use crate::config::{Matrix, Method, PrecondKind, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{write_json, write_text};

/// Everything a solve produces, before it is written to disk.
pub struct SolveOutput {
    pub report: serde_json::Value,
    pub polynomial: serde_json::Value,
    pub history_csv: String,
    pub build_seconds: f64,
    pub apply_seconds: f64,
}

/// Runs the configured solve and writes `residual_history.csv`,
/// `report.json` and `poly.json` into the output directory.
pub fn cmd_solve(cfg: &RunConfig) -> CliResult<SolveOutput> {
    let out = run_solve(cfg)?;
    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
    write_text(&cfg.out.join("residual_history.csv"), &out.history_csv)?;
    write_json(&cfg.out.join("report.json"), &out.report)?;
    write_json(&cfg.out.join("poly.json"), &out.polynomial)?;
    eprintln!(
        "build {:.3} s, apply {:.3} s; outputs in {}",
        out.build_seconds,
        out.apply_seconds,
        cfg.out.display()
    );
    Ok(out)
}

/// Runs the configured solve without touching the file system.
pub fn run_solve(cfg: &RunConfig) -> CliResult<SolveOutput> {
    match cfg.matrix.load()? {
        Matrix::Real(a) => solve_typed(&a, cfg),
        Matrix::Complex(a) => solve_typed(&a, cfg),
    }
}

fn load_rhs<S: Scalar>(n: usize, cfg: &RunConfig) -> CliResult<Vec<Vec<S>>> {
    let Some(path) = &cfg.rhs_file else {
        let spec = RhsSpec {
            kind: cfg.rhs_kind,
            seed: cfg.seed,
            count: cfg.nrhs,
        };
        return Ok(gen_rhs(n, &spec)?);
    };
    let cols = read_matrix_market_columns(path)?;
    cols.into_iter()
        .map(|c| {
            if c.len() != n {
                return Err(CliError::Config(format!(
                    "right-hand side length {} does not match matrix order {n}",
                    c.len()
                )));
            }
            if !S::IS_COMPLEX && c.iter().any(|z| z.im != 0.0) {
                return Err(CliError::Config("complex right-hand sides need a complex matrix".into()));
            }
            Ok(c.into_iter().map(S::from_complex).collect())
        })
        .collect()
}

fn solve_typed<S: Scalar>(a: &SparseMatrix<S>, cfg: &RunConfig) -> CliResult<SolveOutput> {
    if !a.is_square() {
        return Err(CliError::Config("the matrix must be square".into()));
    }
    let rhs = load_rhs::<S>(a.n_rows(), cfg)?;
    let opts = MultiRhsOptions {
        rtol: cfg.rtol1,
        max_it: cfg.max_it,
        stabilization: cfg.stabilization,
        stabilize: StabilizeParams {
            pofcutoff: cfg.pofcutoff,
            seed: cfg.seed,
            ..StabilizeParams::default()
        },
        threads: cfg.threads,
    };
    let mut extra = serde_json::Map::new();
    let mut report = match cfg.precond {
        PrecondKind::None => run_method(a, a, &rhs, cfg, &opts, &mut extra)?,
        PrecondKind::Ilu0 => {
            let m = ilu0(a).map_err(|e| e.at_stage("ILU(0)"))?;
            let op = RightPreconditioned::new(a, &m);
            let mut rep = run_method(&op, a, &rhs, cfg, &opts, &mut extra)?;
            // Map y back to x = M⁻¹ y and recompute residuals with A.
            for (sys, y) in rep.systems.iter_mut().zip(rep.solutions.iter_mut()) {
                let x = m.solve(y)?;
                sys.residual = explicit_residual(a, &rhs[sys.index], &x);
                sys.relative_residual = sys.residual / vector::norm(&rhs[sys.index]);
                *y = x;
            }
            rep
        }
    };
    let polynomial = json!({
        "method": &report.method,
        "degree": report.degree,
        "added_roots": report.added_roots,
        "polynomial": std::mem::take(&mut report.polynomial),
    });
    let history_csv = history_csv(&report.history);
    let mut value = json!({
        "config": cfg,
        "n": a.n_rows(),
        "nnz": a.nnz(),
        "scalar": if S::IS_COMPLEX { "complex" } else { "real" },
        "total_matvecs": report.total_matvecs(),
        "max_relative_residual": report.systems.iter().map(|s| s.relative_residual).fold(0.0, f64::max),
        "report": &report,
    });
    if !extra.is_empty() {
        value["deflation"] = serde_json::Value::Object(extra);
    }
    Ok(SolveOutput {
        report: value,
        polynomial,
        history_csv,
        build_seconds: report.build_seconds,
        apply_seconds: report.apply_seconds,
    })
}

fn run_method<S: Scalar, Op: LinearOperator<S> + ?Sized>(
    op: &Op,
    a: &SparseMatrix<S>,
    rhs: &[Vec<S>],
    cfg: &RunConfig,
    opts: &MultiRhsOptions,
    extra: &mut serde_json::Map<String, serde_json::Value>,
) -> CliResult<MultiRhsReport<S>> {
    let preconditioned = cfg.precond != PrecondKind::None;
    let report = match cfg.method {
        Method::Gmres => solve_multirhs_gmres_poly(op, rhs, opts)?,
        Method::GmresRestarted => solve_multirhs_restarted(op, rhs, cfg.restart, opts)?,
        Method::Double => solve_multirhs_double_poly(op, rhs, cfg.d_phi_in, opts)?,
        Method::Bicgstab => solve_each_bicgstab(op, rhs, opts)?,
        Method::Bicg => {
            if preconditioned {
                return Err(CliError::Config("bicg does not support a preconditioner".into()));
            }
            solve_multirhs_bicg(a, rhs, opts)?
        }
        Method::Deflated => {
            let dopts = DeflationOptions {
                d_phi_in: cfg.d_phi_in,
                nev: cfg.nev,
                rtol1: cfg.rtol1,
                rtol2: cfg.rtol2,
                rtol3: cfg.rtol3,
                max_reapply: cfg.max_reapply,
                max_outer: cfg.max_it,
                eig_residual_max: cfg.eig_residual_max,
                stabilization: opts.stabilization,
                stabilize: opts.stabilize,
                threads: opts.threads,
            };
            let run = deflated_multirhs(op, rhs, &dopts)?;
            extra.insert("first_degree".into(), json!(run.first.degree()));
            extra.insert("deflated_degree".into(), json!(run.poly.degree()));
            extra.insert("basis_size".into(), json!(run.basis.as_ref().map_or(0, |b| b.size())));
            extra.insert(
                "ritz_values".into(),
                json!(run.ritz_values.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()),
            );
            extra.insert("ritz_residuals".into(), json!(run.ritz_residuals));
            run.report
        }
    };
    Ok(report)
}

/// `iteration,residual,relative_residual` rows with 17 significant digits.
pub fn history_csv(history: &[f64]) -> String {
    let mut out = String::from("iteration,residual,relative_residual\n");
    let b = history.first().copied().unwrap_or(1.0);
    for (i, r) in history.iter().enumerate() {
        writeln!(out, "{i},{r:.16e},{:.16e}", r / b).expect("string write");
    }
    out
}

/// Reads a JSON file written by this tool.
pub fn read_json(path: &Path) -> CliResult<serde_json::Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(e.into()))
}
