use super::{explicit_residual, SolveReport};
use crate::error::{check_dim, Error, Result};
use crate::linalg::operator::LinearOperator;
use crate::linalg::vector;
use crate::scalar::Scalar;

/// BiCGStab with shadow vector `r̂₀ = b` and zero initial guess. Breakdown
/// ends the iteration early with `converged = false`; the returned iterate
/// is the one with the smallest residual seen.
pub fn bicgstab<S: Scalar, A: LinearOperator<S> + ?Sized>(
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
    let shadow = b.to_vec();
    let mut p = r.clone();
    let mut v = vec![S::zero(); n];
    let mut t = vec![S::zero(); n];
    let mut rho = vector::dot(&shadow, &r);
    let mut history = vec![b_norm];
    let mut best = (b_norm, x.clone());
    let mut warnings = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut matvecs = 0;
    let tiny = 1e-300;
    while iterations < max_it {
        iterations += 1;
        a.apply(&p, &mut v);
        matvecs += 1;
        let denom = vector::dot(&shadow, &v);
        if denom.abs() <= tiny {
            warnings.push(format!("breakdown: r̂ᴴv vanished at iteration {iterations}"));
            break;
        }
        let alpha = rho / denom;
        let mut s = r.clone();
        vector::axpy(-alpha, &v, &mut s);
        let s_norm = vector::norm(&s);
        if s_norm <= target {
            vector::axpy(alpha, &p, &mut x);
            history.push(s_norm);
            converged = true;
            best = (s_norm, x.clone());
            break;
        }
        a.apply(&s, &mut t);
        matvecs += 1;
        let tt = vector::dot(&t, &t).re();
        if tt <= tiny {
            warnings.push(format!("breakdown: ‖As‖ vanished at iteration {iterations}"));
            break;
        }
        let omega = vector::dot(&t, &s).scale(1.0 / tt);
        vector::axpy(alpha, &p, &mut x);
        vector::axpy(omega, &s, &mut x);
        r = s;
        vector::axpy(-omega, &t, &mut r);
        let r_norm = vector::norm(&r);
        history.push(r_norm);
        if r_norm < best.0 {
            best = (r_norm, x.clone());
        }
        if r_norm <= target {
            converged = true;
            break;
        }
        if omega.abs() <= tiny {
            warnings.push(format!("breakdown: ω vanished at iteration {iterations}"));
            break;
        }
        let rho_next = vector::dot(&shadow, &r);
        if rho_next.abs() <= tiny {
            warnings.push(format!("breakdown: ρ vanished at iteration {iterations}"));
            break;
        }
        let beta = (rho_next / rho) * (alpha / omega);
        rho = rho_next;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
    }
    let x = if converged { x } else { best.1 };
    let explicit = explicit_residual(a, b, &x);
    Ok(SolveReport {
        x,
        history,
        iterations,
        matvecs: matvecs * a.cost(),
        converged,
        roots: Vec::new(),
        explicit_residual: explicit,
        b_norm,
        warnings,
    })
}
