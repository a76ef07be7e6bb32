use num_complex::Complex64;

use super::{explicit_residual, SolveReport};
use crate::error::{check_dim, Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::eigen::hessenberg_eigenvalues;
use crate::linalg::operator::AdjointOperator;
use crate::linalg::svd::symmetric_eigen;
use crate::linalg::vector;
use crate::scalar::Scalar;

/// Inner products below this fraction of the product of norms count as a
/// breakdown of the two-sided recurrence.
const BREAKDOWN_TOL: f64 = 1e-14;

/// BiCG with shadow vector `r̃₀ = b`. The residual polynomial's roots are the
/// eigenvalues of the Lanczos tridiagonal assembled from the recurrence
/// coefficients; they are returned in `roots`. Each iteration applies both
/// `A` and `Aᴴ`.
pub fn bicg_poly<S: Scalar, A: AdjointOperator<S> + ?Sized>(
    a: &A,
    b: &[S],
    rtol: f64,
    max_it: usize,
) -> Result<SolveReport<S>> {
    check_dim(a.dim(), b.len())?;
    let b_norm = vector::norm(b);
    if b_norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let n = b.len();
    let target = rtol * b_norm;
    let mut x = vec![S::zero(); n];
    let mut r = b.to_vec();
    let mut rt = b.to_vec();
    let mut p = r.clone();
    let mut pt = rt.clone();
    let mut rho = vector::dot(&rt, &r);
    let mut ap = vec![S::zero(); n];
    let mut atpt = vec![S::zero(); n];
    let mut alphas: Vec<S> = Vec::new();
    let mut betas: Vec<S> = Vec::new();
    let mut history = vec![b_norm];
    let mut converged = false;
    for it in 0..max_it.min(n) {
        a.apply(&p, &mut ap);
        a.apply_adjoint(&pt, &mut atpt);
        let sigma = vector::dot(&pt, &ap);
        if sigma.abs() <= BREAKDOWN_TOL * vector::norm(&pt) * vector::norm(&ap) {
            return Err(Error::Breakdown {
                iteration: it,
                detail: format!("pivot p̃ᴴAp = {:.3e}", sigma.abs()),
            });
        }
        let alpha = rho / sigma;
        alphas.push(alpha);
        vector::axpy(alpha, &p, &mut x);
        vector::axpy(-alpha, &ap, &mut r);
        vector::axpy(-alpha.conj(), &atpt, &mut rt);
        let r_norm = vector::norm(&r);
        history.push(r_norm);
        if r_norm <= target {
            converged = true;
            break;
        }
        let rho_next = vector::dot(&rt, &r);
        if rho_next.abs() <= BREAKDOWN_TOL * vector::norm(&rt) * r_norm {
            return Err(Error::Breakdown {
                iteration: it,
                detail: format!("Lanczos inner product r̃ᴴr = {:.3e}", rho_next.abs()),
            });
        }
        let beta = rho_next / rho;
        betas.push(beta);
        rho = rho_next;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
            pt[i] = rt[i] + beta.conj() * pt[i];
        }
    }
    let iterations = alphas.len();
    let roots = tridiagonal_roots(&alphas, &betas)?;
    let explicit = explicit_residual(a, b, &x);
    Ok(SolveReport {
        x,
        history,
        iterations,
        matvecs: 2 * iterations * a.cost(),
        converged,
        roots,
        explicit_residual: explicit,
        b_norm,
        warnings: Vec::new(),
    })
}

/// Eigenvalues of the tridiagonal `T` with `A R_k = R_{k+1} T` for the
/// residual vectors: diagonal `1/α_j + β_{j-1}/α_{j-1}`, superdiagonal
/// `-β_{j-1}/α_{j-1}`, subdiagonal `-1/α_j`.
///
/// When every coefficient is real and each off-diagonal product positive the
/// matrix is diagonally similar to a symmetric one, which is used so that the
/// roots come out exactly real.
fn tridiagonal_roots<S: Scalar>(alphas: &[S], betas: &[S]) -> Result<Vec<Complex64>> {
    let k = alphas.len();
    let diag: Vec<S> = (0..k)
        .map(|j| {
            let mut d = S::one() / alphas[j];
            if j > 0 {
                d += betas[j - 1] / alphas[j - 1];
            }
            d
        })
        .collect();
    let upper: Vec<S> = (1..k).map(|j| -(betas[j - 1] / alphas[j - 1])).collect();
    let lower: Vec<S> = (0..k.saturating_sub(1)).map(|j| -(S::one() / alphas[j])).collect();
    let nearly_real = |v: &S| v.im().abs() <= 1e-12 * v.abs();
    let symmetric = diag.iter().chain(&upper).chain(&lower).all(nearly_real)
        && upper.iter().zip(&lower).all(|(u, l)| u.re() * l.re() > 0.0);
    if symmetric {
        let t = DenseMatrix::from_fn(k, k, |i, j| {
            if i == j {
                diag[i].re()
            } else if i + 1 == j {
                (upper[i].re() * lower[i].re()).sqrt()
            } else if j + 1 == i {
                (upper[j].re() * lower[j].re()).sqrt()
            } else {
                0.0
            }
        });
        let (values, _) = symmetric_eigen(&t)?;
        return Ok(values.into_iter().map(|v| Complex64::new(v, 0.0)).collect());
    }
    let t = DenseMatrix::from_fn(k, k, |i, j| {
        if i == j {
            diag[i]
        } else if i + 1 == j {
            upper[i]
        } else if j + 1 == i {
            lower[j]
        } else {
            S::zero()
        }
    });
    hessenberg_eigenvalues(&t)
}
