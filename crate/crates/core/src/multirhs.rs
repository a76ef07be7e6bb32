//! Solving families of systems `A x_j = b_j` with one polynomial built from
//! the first system.

use std::time::Instant;

use serde::Serialize;

use crate::composite::{apply_double, build_double, build_single};
use crate::error::{Error, Result};
use crate::krylov::{bicg_poly, bicgstab, explicit_residual, gmres_restarted, SolveReport};
use crate::linalg::operator::{AdjointOperator, LinearOperator};
use crate::linalg::vector;
use crate::poly::{apply_p, leja_order, stabilize, RootPolynomial, StabilizeParams, Stabilization};
use crate::scalar::Scalar;

/// Outcome for one right-hand side. Residuals are always recomputed as
/// `‖b - A x‖` from the returned solution.
#[derive(Debug, Clone, Serialize)]
pub struct SystemOutcome {
    pub index: usize,
    pub residual: f64,
    pub relative_residual: f64,
    pub matvecs: usize,
    /// Number of polynomial applications (1 unless reapplied).
    pub applications: usize,
}

/// Report of a multi right-hand side run.
///
/// Wall-clock times are kept out of serialization so that reports are
/// reproducible byte for byte; read them from the struct fields.
#[derive(Debug, Clone, Serialize)]
pub struct MultiRhsReport<S> {
    pub method: String,
    pub systems: Vec<SystemOutcome>,
    /// Degree of the polynomial `p` used for the later systems.
    pub degree: usize,
    /// Number of stabilizing roots added (over all root lists).
    pub added_roots: usize,
    /// Krylov basis vectors stored while building the polynomial.
    pub stored_basis_vectors: usize,
    /// Residual history of the building solve, starting with `‖b_1‖`.
    pub history: Vec<f64>,
    /// Serialized polynomial (root lists).
    pub polynomial: serde_json::Value,
    #[serde(skip)]
    pub solutions: Vec<Vec<S>>,
    #[serde(skip)]
    pub build_seconds: f64,
    #[serde(skip)]
    pub apply_seconds: f64,
}

impl<S> MultiRhsReport<S> {
    pub fn total_matvecs(&self) -> usize {
        self.systems.iter().map(|s| s.matvecs).sum()
    }

    /// Largest relative residual over systems `2..N`.
    pub fn max_extra_residual(&self) -> f64 {
        self.systems
            .iter()
            .skip(1)
            .map(|s| s.relative_residual)
            .fold(0.0, f64::max)
    }

    /// One CSV row per system, with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("system,residual,relative_residual,matvecs,applications\n");
        for s in &self.systems {
            out.push_str(&format!(
                "{},{:.6e},{:.6e},{},{}\n",
                s.index + 1,
                s.residual,
                s.relative_residual,
                s.matvecs,
                s.applications
            ));
        }
        out
    }
}

/// Maps `f` over the right-hand sides, optionally on several threads.
/// Results keep the input order and do not depend on the thread count.
pub(crate) fn map_rhs<S, T, F>(rhs: &[Vec<S>], threads: usize, f: F) -> Result<Vec<T>>
where
    S: Scalar,
    T: Send,
    F: Fn(usize, &[S]) -> Result<T> + Sync,
{
    let threads = threads.max(1).min(rhs.len().max(1));
    if threads == 1 {
        return rhs.iter().enumerate().map(|(i, b)| f(i, b)).collect();
    }
    let chunk = rhs.len().div_ceil(threads);
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = rhs
            .chunks(chunk)
            .enumerate()
            .map(|(c, part)| {
                scope.spawn(move || {
                    part.iter()
                        .enumerate()
                        .map(|(i, b)| f(c * chunk + i, b))
                        .collect::<Result<Vec<T>>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(rhs.len());
        for h in handles {
            out.extend(h.join().expect("worker thread panicked")?);
        }
        Ok(out)
    })
}

fn check_rhs<S: Scalar>(n: usize, rhs: &[Vec<S>]) -> Result<()> {
    if rhs.is_empty() {
        return Err(Error::InvalidArgument("at least one right-hand side is required".into()));
    }
    for b in rhs {
        crate::error::check_dim(n, b.len())?;
    }
    Ok(())
}

pub(crate) fn outcome<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    index: usize,
    b: &[S],
    x: &[S],
    matvecs: usize,
    applications: usize,
) -> SystemOutcome {
    let residual = explicit_residual(a, b, x);
    SystemOutcome {
        index,
        residual,
        relative_residual: residual / vector::norm(b),
        matvecs,
        applications,
    }
}

/// Shared knobs of the multi right-hand side drivers.
#[derive(Debug, Clone, Copy)]
pub struct MultiRhsOptions {
    pub rtol: f64,
    pub max_it: usize,
    pub stabilization: Stabilization,
    pub stabilize: StabilizeParams,
    pub threads: usize,
}

impl Default for MultiRhsOptions {
    fn default() -> Self {
        MultiRhsOptions {
            rtol: 1e-10,
            max_it: 1000,
            stabilization: Stabilization::Updating,
            stabilize: StabilizeParams::default(),
            threads: 1,
        }
    }
}

/// Full GMRES on the first system, then one application of the stabilized
/// residual polynomial per remaining system. Each later system is charged
/// `degree(π)` products: `degree(π) - 1` for `p(A) b` and one for the
/// residual check.
pub fn solve_multirhs_gmres_poly<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    rhs: &[Vec<S>],
    opts: &MultiRhsOptions,
) -> Result<MultiRhsReport<S>> {
    check_rhs(a.dim(), rhs)?;
    let start = Instant::now();
    let build = build_single(a, &rhs[0], opts.rtol, opts.max_it, opts.stabilization, &opts.stabilize)
        .map_err(|e| e.at_stage("GMRES on the first system"))?;
    let stored = build.krylov.basis.len();
    finish_single(a, rhs, "gmres", build.report, build.poly, stored, opts, start)
}

/// Restarted GMRES(`m`) on the first system; the harmonic Ritz values of
/// all cycles form one root list (Leja ordered and stabilized as a whole)
/// that is applied to the remaining systems.
pub fn solve_multirhs_restarted<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    rhs: &[Vec<S>],
    m: usize,
    opts: &MultiRhsOptions,
) -> Result<MultiRhsReport<S>> {
    check_rhs(a.dim(), rhs)?;
    let start = Instant::now();
    let report = gmres_restarted(a, &rhs[0], m, opts.rtol, opts.max_it)
        .map_err(|e| e.at_stage("restarted GMRES on the first system"))?;
    let poly = poly_from_roots::<S>(&report.roots, opts)?;
    finish_single(a, rhs, "gmres_restarted", report, poly, m + 1, opts, start)
}

/// BiCG on the first system; the eigenvalues of its tridiagonal matrix are
/// the roots of the polynomial applied to the remaining systems.
pub fn solve_multirhs_bicg<S: Scalar, A: AdjointOperator<S> + ?Sized>(
    a: &A,
    rhs: &[Vec<S>],
    opts: &MultiRhsOptions,
) -> Result<MultiRhsReport<S>> {
    check_rhs(a.dim(), rhs)?;
    let start = Instant::now();
    let report = bicg_poly(a, &rhs[0], opts.rtol, opts.max_it).map_err(|e| e.at_stage("BiCG on the first system"))?;
    let poly = poly_from_roots::<S>(&report.roots, opts)?;
    finish_single(a, rhs, "bicg", report, poly, 4, opts, start)
}

/// Independent BiCGStab solves of every system (no polynomial is kept).
pub fn solve_each_bicgstab<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    rhs: &[Vec<S>],
    opts: &MultiRhsOptions,
) -> Result<MultiRhsReport<S>> {
    check_rhs(a.dim(), rhs)?;
    let start = Instant::now();
    let reports = map_rhs(rhs, opts.threads, |i, b| {
        let rep = bicgstab(a, b, opts.rtol, opts.max_it)?;
        Ok((outcome(a, i, b, &rep.x, rep.matvecs, 1), rep))
    })
    .map_err(|e| e.at_stage("BiCGStab"))?;
    let history = reports[0].1.history.clone();
    let (systems, solutions) = reports.into_iter().map(|(o, r)| (o, r.x)).unzip();
    Ok(MultiRhsReport {
        method: "bicgstab".into(),
        systems,
        degree: 0,
        added_roots: 0,
        stored_basis_vectors: 0,
        history,
        polynomial: serde_json::Value::Null,
        solutions,
        build_seconds: 0.0,
        apply_seconds: start.elapsed().as_secs_f64(),
    })
}

fn poly_from_roots<S: Scalar>(roots: &[num_complex::Complex64], opts: &MultiRhsOptions) -> Result<RootPolynomial> {
    let base = leja_order(roots, !S::IS_COMPLEX).map_err(|e| e.at_stage("ordering roots"))?;
    Ok(stabilize(&base, opts.stabilization, &opts.stabilize))
}

#[allow(clippy::too_many_arguments)]
fn finish_single<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    rhs: &[Vec<S>],
    method: &str,
    report: SolveReport<S>,
    poly: RootPolynomial,
    stored: usize,
    opts: &MultiRhsOptions,
    start: Instant,
) -> Result<MultiRhsReport<S>> {
    if !report.converged {
        return Err(Error::NotConverged(format!(
            "reached relative residual {:.3e} in {} iterations",
            report.relative_residual(),
            report.iterations
        ))
        .at_stage("first system"));
    }
    let build_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let per_system = poly.degree_p() * a.cost() + a.cost();
    let rest = map_rhs(&rhs[1..], opts.threads, |i, b| {
        let x = apply_p(&poly, a, b)?;
        Ok((outcome(a, i + 1, b, &x, per_system, 1), x))
    })?;
    let apply_seconds = start.elapsed().as_secs_f64();
    let mut systems = vec![outcome(a, 0, &rhs[0], &report.x, report.matvecs, 1)];
    let mut solutions = vec![report.x.clone()];
    for (o, x) in rest {
        systems.push(o);
        solutions.push(x);
    }
    Ok(MultiRhsReport {
        method: method.into(),
        systems,
        degree: poly.degree_p(),
        added_roots: poly.added_count(),
        stored_basis_vectors: stored,
        history: report.history.clone(),
        polynomial: serde_json::to_value(&poly)?,
        solutions,
        build_seconds,
        apply_seconds,
    })
}

/// Double polynomial from PP(`d_phi_in`)-GMRES on the first system, applied
/// once to every remaining system.
pub fn solve_multirhs_double_poly<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    rhs: &[Vec<S>],
    d_phi_in: usize,
    opts: &MultiRhsOptions,
) -> Result<MultiRhsReport<S>> {
    check_rhs(a.dim(), rhs)?;
    let start = Instant::now();
    let build = build_double(a, &rhs[0], d_phi_in, opts.rtol, opts.max_it, opts.stabilization, &opts.stabilize)
        .map_err(|e| e.at_stage("PP-GMRES on the first system"))?;
    let build_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let poly = &build.poly;
    let per_system = poly.matvecs_per_apply() * a.cost() + a.cost();
    let rest = map_rhs(&rhs[1..], opts.threads, |i, b| {
        let x = apply_double(poly, a, b)?;
        Ok((outcome(a, i + 1, b, &x, per_system, 1), x))
    })?;
    let apply_seconds = start.elapsed().as_secs_f64();
    let mut systems = vec![outcome(a, 0, &rhs[0], &build.report.x, build.report.matvecs, 1)];
    let mut solutions = vec![build.report.x.clone()];
    for (o, x) in rest {
        systems.push(o);
        solutions.push(x);
    }
    Ok(MultiRhsReport {
        method: "double".into(),
        systems,
        degree: poly.degree(),
        added_roots: poly.inner.added_count() + poly.outer.added_count(),
        // Inner run basis plus outer run basis.
        stored_basis_vectors: d_phi_in + 1 + build.outer_krylov.basis.len(),
        history: build.report.history.clone(),
        polynomial: serde_json::to_value(poly)?,
        solutions,
        build_seconds,
        apply_seconds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sparse::SparseMatrix;

    #[test]
    fn identity_solves_everything_with_degree_one_pi() {
        let a = SparseMatrix::<f64>::identity(5);
        let rhs = vec![vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![0.5; 5], vec![-1.0, 0.0, 1.0, 0.0, 2.0]];
        let rep = solve_multirhs_gmres_poly(&a, &rhs, &MultiRhsOptions::default()).unwrap();
        assert_eq!(rep.degree, 0);
        assert!(rep.systems.iter().all(|s| s.relative_residual < 1e-15));
        assert_eq!(rep.systems[1].matvecs, 1);
    }

    #[test]
    fn threads_do_not_change_results() {
        let diag: Vec<f64> = (1..=40).map(f64::from).collect();
        let a = SparseMatrix::from_diagonal(&diag);
        let rhs: Vec<Vec<f64>> = (0..7).map(|k| (0..40).map(|i| ((i * 7 + k) % 5) as f64 + 1.0).collect()).collect();
        let one = solve_multirhs_gmres_poly(&a, &rhs, &MultiRhsOptions::default()).unwrap();
        let opts = MultiRhsOptions {
            threads: 3,
            ..MultiRhsOptions::default()
        };
        let three = solve_multirhs_gmres_poly(&a, &rhs, &opts).unwrap();
        assert_eq!(one.solutions, three.solutions);
    }
}
