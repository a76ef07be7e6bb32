use num_complex::Complex64;

use super::arnoldi::{Arnoldi, KrylovDecomposition};
use super::ritz::harmonic_ritz;
use super::{explicit_residual, SolveReport};
use crate::error::{check_dim, Error, Result};
use crate::linalg::lstsq::HessenbergLsq;
use crate::linalg::operator::LinearOperator;
use crate::linalg::vector;
use crate::scalar::Scalar;

/// Explicit and estimated residuals may drift apart by this factor before a
/// warning is attached to the report.
const DRIFT_WARNING_FACTOR: f64 = 10.0;

/// Full (unrestarted) GMRES from a zero initial guess.
///
/// Returns the final Arnoldi data alongside the report so that callers can
/// extract harmonic Ritz values. The report's `roots` are left empty.
pub fn gmres_full<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    b: &[S],
    rtol: f64,
    max_it: usize,
) -> Result<(SolveReport<S>, KrylovDecomposition<S>)> {
    check_dim(a.dim(), b.len())?;
    if !(rtol > 0.0) || max_it == 0 {
        return Err(Error::InvalidArgument(
            "GMRES needs rtol > 0 and max_it >= 1".into(),
        ));
    }
    let mut process = Arnoldi::new(a, b)?;
    let beta = process.beta();
    let mut lsq = HessenbergLsq::<S>::new(beta);
    let mut history = vec![beta];
    let target = rtol * beta;
    let mut converged = false;
    for _ in 0..max_it.min(a.dim()) {
        let Some(col) = process.step() else { break };
        let res = lsq.push_column(col.to_vec());
        history.push(res);
        if res <= target || process.is_invariant() {
            converged = res <= target;
            break;
        }
    }
    let iterations = process.steps();
    let mut warnings = Vec::new();
    let x = match lsq.solve() {
        Ok(y) => process.combine(&y),
        Err(e) => {
            warnings.push(format!("stagnation: {e}"));
            vec![S::zero(); b.len()]
        }
    };
    let explicit = explicit_residual(a, b, &x);
    let estimate = *history.last().expect("history starts with beta");
    check_drift(explicit, estimate, beta, &mut warnings);
    if !converged && process.is_invariant() {
        warnings.push("invariant subspace reached above tolerance".into());
    }
    let report = SolveReport {
        x,
        history,
        iterations,
        matvecs: iterations * a.cost(),
        converged,
        roots: Vec::new(),
        explicit_residual: explicit,
        b_norm: beta,
        warnings,
    };
    Ok((report, process.into_decomposition()))
}

fn check_drift(explicit: f64, estimate: f64, beta: f64, warnings: &mut Vec<String>) {
    let floor = 1e-15 * beta;
    let (hi, lo) = if explicit > estimate {
        (explicit, estimate)
    } else {
        (estimate, explicit)
    };
    if hi > DRIFT_WARNING_FACTOR * lo.max(floor) {
        warnings.push(format!(
            "explicit residual {explicit:.3e} differs from the estimate {estimate:.3e}"
        ));
    }
}

/// Restarted GMRES(m). Every cycle contributes the harmonic Ritz values of
/// its own Arnoldi data to `roots`; their product is the overall residual
/// polynomial.
pub fn gmres_restarted<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    b: &[S],
    m: usize,
    rtol: f64,
    max_cycles: usize,
) -> Result<SolveReport<S>> {
    check_dim(a.dim(), b.len())?;
    if m == 0 || !(rtol > 0.0) || max_cycles == 0 {
        return Err(Error::InvalidArgument(
            "restarted GMRES needs m >= 1, rtol > 0 and max_cycles >= 1".into(),
        ));
    }
    let b_norm = vector::norm(b);
    if b_norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let target = rtol * b_norm;
    let mut x = vec![S::zero(); b.len()];
    let mut r = b.to_vec();
    let mut r_norm = b_norm;
    let mut history = vec![b_norm];
    let mut roots: Vec<Complex64> = Vec::new();
    let mut warnings = Vec::new();
    let mut matvecs = 0;
    let mut iterations = 0;
    let mut converged = false;
    for cycle in 0..max_cycles {
        let cycle_rtol = target / r_norm;
        let (report, decomposition) = gmres_full(a, &r, cycle_rtol, m)?;
        matvecs += report.matvecs;
        iterations += report.iterations;
        roots.extend(harmonic_ritz(&decomposition)?);
        vector::axpy(S::one(), &report.x, &mut x);
        r = vector::sub(b, &a.apply_vec(&x));
        matvecs += a.cost();
        let new_norm = vector::norm(&r);
        history.push(new_norm);
        if new_norm <= target {
            converged = true;
            break;
        }
        if new_norm >= r_norm * (1.0 - 1e-12) {
            warnings.push(format!("cycle {cycle} made no progress"));
            break;
        }
        r_norm = new_norm;
    }
    let explicit = *history.last().expect("nonempty");
    Ok(SolveReport {
        x,
        history,
        iterations,
        matvecs,
        converged,
        roots,
        explicit_residual: explicit,
        b_norm,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sparse::SparseMatrix;

    #[test]
    fn identity_converges_in_one_step() {
        let a = SparseMatrix::<f64>::identity(4);
        let b = [1.0, 2.0, 3.0, 4.0];
        let (rep, _) = gmres_full(&a, &b, 1e-12, 10).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
        assert!(rep.explicit_residual < 1e-14);
    }

    #[test]
    fn diagonal_three_exact_in_three() {
        let a = SparseMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let b = [1.0, 1.0, 1.0];
        let (rep, _) = gmres_full(&a, &b, 1e-14, 10).unwrap();
        assert_eq!(rep.iterations, 3);
        assert!(rep.explicit_residual < 1e-13);
        assert!(rep.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn restarted_collects_m_roots_per_cycle() {
        let diag: Vec<f64> = (1..=200).map(f64::from).collect();
        let a = SparseMatrix::from_diagonal(&diag);
        let b = vec![1.0; 200];
        let rep = gmres_restarted(&a, &b, 10, 1e-30, 3).unwrap();
        assert_eq!(rep.roots.len(), 30);
        assert!(!rep.converged);
    }
}
