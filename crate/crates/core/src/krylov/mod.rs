//! Krylov solvers that double as polynomial builders.
//!
//! Every solver starts from a zero initial guess, so the iterate after `k`
//! steps is `p(A) b` for the method's polynomial and the residual is
//! `π(A) b` with `π(z) = 1 - z p(z)`.

mod arnoldi;
mod bicg;
mod bicgstab;
mod gmres;
mod ritz;

use num_complex::Complex64;
use serde::Serialize;

pub use arnoldi::{arnoldi, Arnoldi, KrylovDecomposition, BREAKDOWN_TOL};
pub use bicg::bicg_poly;
pub use bicgstab::bicgstab;
pub use gmres::{gmres_full, gmres_restarted};
pub use ritz::{harmonic_ritz, rayleigh_ritz_eigs, ritz, RitzPairs};

/// Outcome of a Krylov solve.
///
/// `history[0]` is `‖b‖` and `history[j]` the residual norm after iteration
/// (or cycle) `j`. `matvecs` counts products with the operator used by the
/// method itself; the final explicit residual check is not included.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport<S> {
    pub x: Vec<S>,
    pub history: Vec<f64>,
    pub iterations: usize,
    pub matvecs: usize,
    pub converged: bool,
    /// Roots of the residual polynomial harvested by the method.
    pub roots: Vec<Complex64>,
    /// `‖b - A x‖` recomputed from scratch at exit.
    pub explicit_residual: f64,
    pub b_norm: f64,
    pub warnings: Vec<String>,
}

impl<S> SolveReport<S> {
    pub fn relative_residual(&self) -> f64 {
        self.explicit_residual / self.b_norm
    }
}

pub fn explicit_residual<S: crate::Scalar, A: crate::linalg::LinearOperator<S> + ?Sized>(
    a: &A,
    b: &[S],
    x: &[S],
) -> f64 {
    let ax = a.apply_vec(x);
    crate::linalg::vector::norm(&crate::linalg::vector::sub(b, &ax))
}
