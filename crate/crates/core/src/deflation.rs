//! Galerkin projection deflation and the deflated multi right-hand side
//! driver.

use std::time::Instant;

use num_complex::Complex64;

use crate::composite::{apply_double, build_double, build_outer, DoublePolynomial};
use crate::error::{check_dim, Error, Result};
use crate::krylov::rayleigh_ritz_eigs;
use crate::linalg::dense::{DenseMatrix, Lu};
use crate::linalg::operator::LinearOperator;
use crate::linalg::vector;
use crate::multirhs::{map_rhs, outcome, MultiRhsReport, SystemOutcome};
use crate::poly::{StabilizeParams, Stabilization};
use crate::scalar::Scalar;

/// Relative norm left after orthogonalization below which a vector is
/// treated as linearly dependent on the previous ones.
pub const RANK_TOL: f64 = 1e-10;

/// Orthonormal right basis `V`, optional left basis `W`, and the factored
/// projected matrix `G = WᴴAV` (or `VᴴAV`).
#[derive(Debug, Clone)]
pub struct DeflationBasis<S> {
    pub v: Vec<Vec<S>>,
    pub w: Option<Vec<Vec<S>>>,
    /// Columns `A v_i`, kept so that deflation needs no further products.
    pub av: Vec<Vec<S>>,
    pub g: DenseMatrix<S>,
    lu: Lu<S>,
    /// `‖A v_i - θ_i v_i‖` with the Rayleigh quotient `θ_i = v_iᴴ A v_i`.
    pub eig_residuals: Vec<f64>,
}

impl<S: Scalar> DeflationBasis<S> {
    pub fn size(&self) -> usize {
        self.v.len()
    }

    pub fn dim(&self) -> usize {
        self.v.first().map_or(0, Vec::len)
    }

    /// Solution `d` of `G d = Wᴴ b` (or `Vᴴ b`).
    fn coefficients(&self, b: &[S]) -> Result<Vec<S>> {
        let left = self.w.as_ref().unwrap_or(&self.v);
        let rhs: Vec<S> = left.iter().map(|w| vector::dot(w, b)).collect();
        self.lu.solve(&rhs)
    }
}

/// Result of a Galerkin projection: `x_e = V d` and `r = b - A x_e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Deflated<S> {
    pub x_e: Vec<S>,
    pub r: Vec<S>,
}

/// Modified Gram–Schmidt with a second pass. Dependent vectors are an error
/// unless `drop_dependent` is set, in which case they are skipped.
fn orthonormalize<S: Scalar>(vectors: &[Vec<S>], drop_dependent: bool) -> Result<Vec<Vec<S>>> {
    let mut out: Vec<Vec<S>> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        let original = vector::norm(v);
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = vector::dot(q, &w);
                vector::axpy(-c, q, &mut w);
            }
        }
        let nw = vector::norm(&w);
        if original == 0.0 || nw <= RANK_TOL * original {
            if drop_dependent {
                continue;
            }
            return Err(Error::RankDeficient { index });
        }
        vector::scale_real(1.0 / nw, &mut w);
        out.push(w);
    }
    Ok(out)
}

fn build_basis<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    v: Vec<Vec<S>>,
    w: Option<Vec<Vec<S>>>,
) -> Result<DeflationBasis<S>> {
    let av: Vec<Vec<S>> = v.iter().map(|x| a.apply_vec(x)).collect();
    let left = w.as_ref().unwrap_or(&v);
    let k = v.len();
    let g = DenseMatrix::from_fn(k, k, |i, j| vector::dot(&left[i], &av[j]));
    let lu = g.lu().map_err(|e| e.at_stage("factoring the projected matrix"))?;
    let eig_residuals = v
        .iter()
        .zip(&av)
        .map(|(x, ax)| {
            let theta = vector::dot(x, ax);
            let mut res = ax.clone();
            vector::axpy(-theta, x, &mut res);
            vector::norm(&res)
        })
        .collect();
    Ok(DeflationBasis {
        v,
        w,
        av,
        g,
        lu,
        eig_residuals,
    })
}

/// Orthonormalizes `vectors` (and `left_vectors`, if given), then forms and
/// factors `G` once.
pub fn make_deflation_basis<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    vectors: &[Vec<S>],
    left_vectors: Option<&[Vec<S>]>,
) -> Result<DeflationBasis<S>> {
    for x in vectors.iter().chain(left_vectors.unwrap_or(&[])) {
        check_dim(a.dim(), x.len())?;
    }
    if let Some(w) = left_vectors {
        check_dim(vectors.len(), w.len())?;
    }
    let v = orthonormalize(vectors, false)?;
    let w = left_vectors.map(|w| orthonormalize(w, false)).transpose()?;
    build_basis(a, v, w)
}

/// One- or two-sided Galerkin projection of `b` onto the basis. Uses the
/// stored `A V`, so it costs no products with `A`.
pub fn galerkin_deflate<S: Scalar>(basis: &DeflationBasis<S>, b: &[S]) -> Result<Deflated<S>> {
    let n = basis.dim();
    check_dim(n, b.len())?;
    let mut x_e = vec![S::zero(); n];
    let mut r = b.to_vec();
    if basis.size() == 0 {
        return Ok(Deflated { x_e, r });
    }
    let d = basis.coefficients(b)?;
    for ((v, av), &dj) in basis.v.iter().zip(&basis.av).zip(&d) {
        vector::axpy(dj, v, &mut x_e);
        vector::axpy(-dj, av, &mut r);
    }
    Ok(Deflated { x_e, r })
}

/// Real basis spanning the Ritz vectors: the real part of each real Ritz
/// vector (after removing its arbitrary phase), and real and imaginary
/// parts for each complex conjugate pair.
fn real_span<S: Scalar>(values: &[Complex64], vectors: &[Vec<Complex64>]) -> Vec<Vec<S>> {
    let mut out = Vec::new();
    let mut used = vec![false; values.len()];
    for i in 0..values.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let x = &vectors[i];
        if S::IS_COMPLEX {
            out.push(x.iter().map(|&z| S::from_complex(z)).collect());
        } else if values[i].im == 0.0 {
            let pivot = x.iter().copied().fold(Complex64::new(0.0, 0.0), |m, z| {
                if z.norm() > m.norm() {
                    z
                } else {
                    m
                }
            });
            let phase = if pivot.norm() > 0.0 {
                pivot.conj() / pivot.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            out.push(x.iter().map(|&z| S::from_f64((z * phase).re)).collect());
        } else {
            if let Some(p) = (i + 1..values.len()).find(|&p| !used[p] && values[p] == values[i].conj()) {
                used[p] = true;
            }
            out.push(x.iter().map(|z| S::from_f64(z.re)).collect());
            out.push(x.iter().map(|z| S::from_f64(z.im)).collect());
        }
    }
    out
}

/// Settings of [`deflated_multirhs`].
#[derive(Debug, Clone, Copy)]
pub struct DeflationOptions {
    pub d_phi_in: usize,
    pub nev: usize,
    /// Relative tolerance for the first system.
    pub rtol1: f64,
    /// Relative tolerance (with respect to `‖b_2‖`) for the deflated
    /// polynomial preconditioned GMRES run on the second system.
    pub rtol2: f64,
    /// Target relative residual for systems `2..N`.
    pub rtol3: f64,
    /// Reapplications allowed after the first application.
    pub max_reapply: usize,
    pub max_outer: usize,
    /// Only Ritz pairs with residual norm at most this are used.
    pub eig_residual_max: Option<f64>,
    pub stabilization: Stabilization,
    pub stabilize: StabilizeParams,
    pub threads: usize,
}

impl Default for DeflationOptions {
    fn default() -> Self {
        DeflationOptions {
            d_phi_in: 25,
            nev: 30,
            rtol1: 1e-11,
            rtol2: 1e-9,
            rtol3: 1e-8,
            max_reapply: 8,
            max_outer: 1000,
            eig_residual_max: None,
            stabilization: Stabilization::Updating,
            stabilize: StabilizeParams::default(),
            threads: 1,
        }
    }
}

/// Output of [`deflated_multirhs`].
pub struct DeflatedRun<S> {
    /// Per-system outcomes. The polynomial fields describe the deflated
    /// polynomial used for systems `2..N`.
    pub report: MultiRhsReport<S>,
    /// Polynomial from the first system.
    pub first: DoublePolynomial,
    /// Deflated polynomial (equal to `first` when `nev = 0`).
    pub poly: DoublePolynomial,
    pub basis: Option<DeflationBasis<S>>,
    pub ritz_values: Vec<Complex64>,
    pub ritz_residuals: Vec<f64>,
}

/// Deflated double-polynomial solver for many right-hand sides.
///
/// 1. PP(`d_phi_in`)-GMRES on system 1 to `rtol1`; Rayleigh–Ritz on its outer
///    Krylov basis gives the `nev` smallest approximate eigenpairs.
/// 2. System 2 is projected, then PP-GMRES with the same inner polynomial on
///    the deflated residual yields the deflated double polynomial.
/// 3. Systems `3..N`: `x = x_e + p(A) r` after projection.
/// 4. While `‖b - A x‖ > rtol3 ‖b‖`, project the residual and apply `p(A)`
///    again, at most `max_reapply` times (system 2 included).
///
/// With `nev = 0` nothing is deflated and the first polynomial is applied
/// once to every other system, exactly as in
/// [`solve_multirhs_double_poly`](crate::multirhs::solve_multirhs_double_poly).
///
/// Matvecs charged to system 1 include the Rayleigh–Ritz and basis setup
/// products. Each residual check costs one product.
pub fn deflated_multirhs<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    rhs: &[Vec<S>],
    opts: &DeflationOptions,
) -> Result<DeflatedRun<S>> {
    if rhs.len() < 2 {
        return Err(Error::InvalidArgument("deflation needs at least two right-hand sides".into()));
    }
    for b in rhs {
        check_dim(a.dim(), b.len())?;
    }
    let cost = a.cost();
    let start = Instant::now();
    let first = build_double(
        a,
        &rhs[0],
        opts.d_phi_in,
        opts.rtol1,
        opts.max_outer,
        opts.stabilization,
        &opts.stabilize,
    )
    .map_err(|e| e.at_stage("system 1"))?;
    let mut matvecs1 = first.report.matvecs;
    let first_poly = first.poly.clone();

    if opts.nev == 0 {
        let build_seconds = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let per_system = first_poly.matvecs_per_apply() * cost + cost;
        let rest = map_rhs(&rhs[1..], opts.threads, |i, b| {
            let x = apply_double(&first_poly, a, b)?;
            Ok((outcome(a, i + 1, b, &x, per_system, 1), x))
        })?;
        let mut report = assemble(
            a,
            "deflated",
            rhs,
            &first.report.x,
            matvecs1,
            rest,
            &first_poly,
            first.report.history.clone(),
            opts.d_phi_in + 1 + first.outer_krylov.basis.len(),
        )?;
        report.build_seconds = build_seconds;
        report.apply_seconds = start.elapsed().as_secs_f64();
        return Ok(DeflatedRun {
            report,
            poly: first_poly.clone(),
            first: first_poly,
            basis: None,
            ritz_values: Vec::new(),
            ritz_residuals: Vec::new(),
        });
    }

    let outer_basis = &first.outer_krylov.basis;
    let pairs = rayleigh_ritz_eigs(a, outer_basis, opts.nev.min(outer_basis.len()))
        .map_err(|e| e.at_stage("eigenvector harvest"))?;
    matvecs1 += outer_basis.len() * cost;
    let keep: Vec<usize> = (0..pairs.values.len())
        .filter(|&i| opts.eig_residual_max.is_none_or(|t| pairs.residual_norms[i] <= t))
        .collect();
    let values: Vec<Complex64> = keep.iter().map(|&i| pairs.values[i]).collect();
    let vecs: Vec<Vec<Complex64>> = keep.iter().map(|&i| pairs.vectors[i].clone()).collect();
    let v = orthonormalize(&real_span::<S>(&values, &vecs), true)?;
    let basis = build_basis(a, v, None).map_err(|e| e.at_stage("deflation basis"))?;
    matvecs1 += basis.size() * cost;

    let b2 = &rhs[1];
    let b2_norm = vector::norm(b2);
    let defl = galerkin_deflate(&basis, b2).map_err(|e| e.at_stage("system 2"))?;
    let r2_norm = vector::norm(&defl.r);
    let (poly, x2, matvecs2, history) = if r2_norm <= opts.rtol2 * b2_norm {
        // The projection alone meets the tolerance; keep the first polynomial.
        (first_poly.clone(), defl.x_e.clone(), 0, vec![b2_norm, r2_norm])
    } else {
        let build = build_outer(
            a,
            first_poly.inner.clone(),
            &defl.r,
            opts.rtol2 * b2_norm / r2_norm,
            opts.max_outer,
            opts.stabilization,
            &opts.stabilize,
        )
        .map_err(|e| e.at_stage("system 2"))?;
        let x2 = vector::add(&defl.x_e, &build.report.x);
        let mut history = vec![b2_norm];
        history.extend(build.report.history.iter().copied());
        (build.poly, x2, build.report.matvecs, history)
    };
    let build_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let per_apply = poly.matvecs_per_apply() * cost;
    let finish = |b: &[S], mut x: Vec<S>, mut matvecs: usize, mut applications: usize| -> Result<(Vec<S>, usize, usize)> {
        let b_norm = vector::norm(b);
        loop {
            let r = vector::sub(b, &a.apply_vec(&x));
            matvecs += cost;
            if vector::norm(&r) <= opts.rtol3 * b_norm || applications > opts.max_reapply {
                return Ok((x, matvecs, applications));
            }
            let d = galerkin_deflate(&basis, &r)?;
            let t = apply_double(&poly, a, &d.r)?;
            for ((xi, ei), ti) in x.iter_mut().zip(&d.x_e).zip(&t) {
                *xi += *ei + *ti;
            }
            matvecs += per_apply;
            applications += 1;
        }
    };
    let (x2, matvecs2, apps2) = finish(b2, x2, matvecs2, 1).map_err(|e| e.at_stage("system 2"))?;
    let second = (outcome(a, 1, b2, &x2, matvecs2, apps2), x2);
    let mut rest = map_rhs(&rhs[2..], opts.threads, |i, b| {
        let d = galerkin_deflate(&basis, b)?;
        let t = apply_double(&poly, a, &d.r)?;
        let x = vector::add(&d.x_e, &t);
        let (x, matvecs, apps) = finish(b, x, per_apply, 1)?;
        Ok((outcome(a, i + 2, b, &x, matvecs, apps), x))
    })
    .map_err(|e| e.at_stage("later systems"))?;
    rest.insert(0, second);
    let mut report = assemble(
        a,
        "deflated",
        rhs,
        &first.report.x,
        matvecs1,
        rest,
        &poly,
        history,
        opts.d_phi_in + 1 + first.outer_krylov.basis.len() + basis.size(),
    )?;
    report.build_seconds = build_seconds;
    report.apply_seconds = start.elapsed().as_secs_f64();
    Ok(DeflatedRun {
        report,
        first: first_poly,
        poly,
        ritz_residuals: keep.iter().map(|&i| pairs.residual_norms[i]).collect(),
        ritz_values: values,
        basis: Some(basis),
    })
}

#[allow(clippy::too_many_arguments)]
fn assemble<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    method: &str,
    rhs: &[Vec<S>],
    x1: &[S],
    matvecs1: usize,
    rest: Vec<(SystemOutcome, Vec<S>)>,
    poly: &DoublePolynomial,
    history: Vec<f64>,
    stored: usize,
) -> Result<MultiRhsReport<S>> {
    let mut systems = vec![outcome(a, 0, &rhs[0], x1, matvecs1, 1)];
    let mut solutions = vec![x1.to_vec()];
    for (o, x) in rest {
        systems.push(o);
        solutions.push(x);
    }
    Ok(MultiRhsReport {
        method: method.into(),
        systems,
        degree: poly.degree(),
        added_roots: poly.inner.added_count() + poly.outer.added_count(),
        stored_basis_vectors: stored,
        history,
        polynomial: serde_json::to_value(poly)?,
        solutions,
        build_seconds: 0.0,
        apply_seconds: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sparse::SparseMatrix;
    use crate::rng::Rng;

    #[test]
    fn exact_eigenvectors_give_diagonal_g() {
        let a = SparseMatrix::from_diagonal(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let v = vec![vector::unit::<f64>(5, 0), vector::unit(5, 1)];
        let b = make_deflation_basis(&a, &v, None).unwrap();
        assert_eq!(b.g, DenseMatrix::from_diagonal(&[1.0, 2.0]));
        assert!(b.eig_residuals.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn single_vector_projection() {
        let a = SparseMatrix::from_diagonal(&[1.0, 2.0]);
        let b = make_deflation_basis(&a, &[vec![1.0, 0.0]], None).unwrap();
        let d = galerkin_deflate(&b, &[1.0, 1.0]).unwrap();
        assert_eq!(d.x_e, vec![1.0, 0.0]);
        assert_eq!(d.r, vec![0.0, 1.0]);
    }

    #[test]
    fn full_space_basis_solves_exactly() {
        let mut rng = Rng::new(1);
        let a = SparseMatrix::from_dense(&DenseMatrix::from_fn(6, 6, |i, j| {
            rng.normal() + if i == j { 6.0 } else { 0.0 }
        }));
        let v: Vec<Vec<f64>> = (0..6).map(|_| (0..6).map(|_| rng.normal()).collect()).collect();
        let basis = make_deflation_basis(&a, &v, None).unwrap();
        let b: Vec<f64> = (0..6).map(|_| rng.normal()).collect();
        let d = galerkin_deflate(&basis, &b).unwrap();
        assert!(vector::norm(&d.r) <= 1e-10 * vector::norm(&b));
    }

    #[test]
    fn rank_deficient_vectors_are_rejected() {
        let a = SparseMatrix::<f64>::identity(3);
        let v = vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]];
        assert!(matches!(
            make_deflation_basis(&a, &v, None),
            Err(Error::RankDeficient { index: 1 })
        ));
    }

    #[test]
    fn real_span_of_conjugate_pair() {
        let values = [Complex64::new(1.0, 2.0), Complex64::new(1.0, -2.0)];
        let x = vec![Complex64::new(1.0, 0.5), Complex64::new(0.0, 1.0)];
        let xc: Vec<Complex64> = x.iter().map(|z| z.conj()).collect();
        let span = real_span::<f64>(&values, &[x, xc]);
        assert_eq!(span, vec![vec![1.0, 0.0], vec![0.5, 1.0]]);
    }
}
