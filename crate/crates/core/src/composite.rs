//! Polynomials built from GMRES runs: single, double (from polynomial
//! preconditioned GMRES) and right-preconditioned.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::krylov::{gmres_full, harmonic_ritz, KrylovDecomposition, SolveReport};
use crate::linalg::operator::{LinearOperator, Preconditioner, RightPreconditioned};
use crate::poly::{apply_p, leja_order, stabilize, PhiOperator, RootPolynomial, StabilizeParams, Stabilization};
use crate::scalar::Scalar;

/// A GMRES run together with the polynomial extracted from it.
pub struct PolyBuild<S> {
    pub poly: RootPolynomial,
    /// Degree of the polynomial before stabilizing roots were added.
    pub base_degree: usize,
    pub report: SolveReport<S>,
    pub krylov: KrylovDecomposition<S>,
}

/// Runs full GMRES on `op` and turns its harmonic Ritz values into a Leja
/// ordered, stabilized root list.
pub fn build_single<S: Scalar, A: LinearOperator<S> + ?Sized>(
    op: &A,
    b: &[S],
    rtol: f64,
    max_it: usize,
    mode: Stabilization,
    params: &StabilizeParams,
) -> Result<PolyBuild<S>> {
    let (mut report, krylov) = gmres_full(op, b, rtol, max_it)?;
    let roots = harmonic_ritz(&krylov)?;
    let base = leja_order(&roots, !S::IS_COMPLEX)?;
    let poly = stabilize(&base, mode, params);
    report.roots = roots;
    Ok(PolyBuild {
        base_degree: base.degree(),
        poly,
        report,
        krylov,
    })
}

/// `p(z) = p_in(z) p_out(φ_in(z))` with `φ_in(z) = z p_in(z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublePolynomial {
    pub inner: RootPolynomial,
    pub outer: RootPolynomial,
}

impl DoublePolynomial {
    /// Degree of the composite `p`: `deg(φ_in) · deg(φ_out) - 1`.
    pub fn degree(&self) -> usize {
        self.inner.degree() * self.outer.degree() - 1
    }

    /// Products with `A` per application of [`apply_double`]; equal to the
    /// composite degree.
    pub fn matvecs_per_apply(&self) -> usize {
        self.degree()
    }

    pub fn d_phi_in(&self) -> usize {
        self.inner.degree()
    }
}

/// Result of [`build_double`].
pub struct DoubleBuild<S> {
    pub poly: DoublePolynomial,
    /// Report of the outer (polynomial preconditioned) GMRES run with the
    /// solution mapped back, `x = p_in(A) y`. Matvecs count products with
    /// `A` in both runs and in the final mapping.
    pub report: SolveReport<S>,
    /// Arnoldi data of the outer run, on the operator `φ_in(A)`.
    pub outer_krylov: KrylovDecomposition<S>,
    pub inner_base_degree: usize,
    pub outer_base_degree: usize,
}

/// Inner polynomial from `d_phi_in` GMRES steps on `A`, outer polynomial from
/// GMRES on `φ_in(A)` to `rtol`. Both root lists are stabilized with `mode`.
pub fn build_double<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    b: &[S],
    d_phi_in: usize,
    rtol: f64,
    max_outer: usize,
    mode: Stabilization,
    params: &StabilizeParams,
) -> Result<DoubleBuild<S>> {
    if d_phi_in == 0 {
        return Err(Error::InvalidArgument("d_phi_in must be at least 1".into()));
    }
    let inner = build_single(a, b, f64::MIN_POSITIVE, d_phi_in, mode, params)
        .map_err(|e| e.at_stage("inner GMRES"))?;
    let mut build = build_outer(a, inner.poly, b, rtol, max_outer, mode, params)?;
    build.report.matvecs += inner.report.matvecs;
    build.inner_base_degree = inner.base_degree;
    Ok(build)
}

/// Outer polynomial from GMRES on `φ_in(A)` for a given inner polynomial.
/// The report's matvecs cover the outer run and the mapping `x = p_in(A) y`.
pub fn build_outer<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    inner: RootPolynomial,
    b: &[S],
    rtol: f64,
    max_outer: usize,
    mode: Stabilization,
    params: &StabilizeParams,
) -> Result<DoubleBuild<S>> {
    let phi = PhiOperator::new(&inner, a)?;
    let outer = build_single(&phi, b, rtol, max_outer, mode, params)
        .map_err(|e| e.at_stage("outer GMRES"))?;
    if !outer.report.converged {
        return Err(Error::NotConverged(format!(
            "outer GMRES reached relative residual {:.3e} after {} iterations",
            outer.report.relative_residual(),
            outer.report.iterations
        )));
    }
    let y = &outer.report.x;
    let x = apply_p(&inner, a, y)?;
    let explicit = crate::krylov::explicit_residual(a, b, &x);
    let mut report = outer.report;
    report.matvecs += inner.degree_p() * a.cost();
    report.x = x;
    report.explicit_residual = explicit;
    Ok(DoubleBuild {
        inner_base_degree: inner.degree(),
        poly: DoublePolynomial {
            inner,
            outer: outer.poly,
        },
        report,
        outer_krylov: outer.krylov,
        outer_base_degree: outer.base_degree,
    })
}

/// `p_in(A) p_out(φ_in(A)) v`.
pub fn apply_double<S: Scalar, A: LinearOperator<S> + ?Sized>(
    d: &DoublePolynomial,
    a: &A,
    v: &[S],
) -> Result<Vec<S>> {
    let phi = PhiOperator::new(&d.inner, a)?;
    let t = apply_p(&d.outer, &phi, v)?;
    apply_p(&d.inner, a, &t)
}

/// `M⁻¹ p(A M⁻¹) v` for a polynomial built on the right-preconditioned
/// operator.
pub fn apply_prec_poly<S: Scalar, A: LinearOperator<S> + ?Sized, M: Preconditioner<S> + ?Sized>(
    minv: &M,
    p: &RootPolynomial,
    a: &A,
    v: &[S],
) -> Result<Vec<S>> {
    let op = RightPreconditioned::new(a, minv);
    let t = apply_p(p, &op, v)?;
    let mut out = vec![S::zero(); v.len()];
    minv.solve(&t, &mut out);
    Ok(out)
}
