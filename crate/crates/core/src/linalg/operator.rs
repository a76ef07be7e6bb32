//! Matrix-free operator abstraction shared by the solvers.

use crate::linalg::dense::DenseMatrix;
use crate::linalg::sparse::SparseMatrix;
use crate::scalar::Scalar;

/// A square linear operator `y = A x`.
pub trait LinearOperator<S: Scalar>: Sync {
    fn dim(&self) -> usize;

    /// Writes `A x` into `y`; both slices have length [`dim`](Self::dim).
    fn apply(&self, x: &[S], y: &mut [S]);

    /// Number of matrix-vector products with the underlying matrix that one
    /// application costs.
    fn cost(&self) -> usize {
        1
    }

    fn apply_vec(&self, x: &[S]) -> Vec<S> {
        let mut y = vec![S::zero(); self.dim()];
        self.apply(x, &mut y);
        y
    }
}

/// Operators that can also apply their adjoint.
pub trait AdjointOperator<S: Scalar>: LinearOperator<S> {
    fn apply_adjoint(&self, x: &[S], y: &mut [S]);
}

/// Approximate inverse applied on the right.
pub trait Preconditioner<S: Scalar>: Sync {
    fn dim(&self) -> usize;

    /// Writes `M⁻¹ x` into `y`.
    fn solve(&self, x: &[S], y: &mut [S]);
}

impl<S: Scalar> LinearOperator<S> for SparseMatrix<S> {
    fn dim(&self) -> usize {
        self.n_rows()
    }

    fn apply(&self, x: &[S], y: &mut [S]) {
        self.spmv_into(x, y);
    }
}

impl<S: Scalar> AdjointOperator<S> for SparseMatrix<S> {
    fn apply_adjoint(&self, x: &[S], y: &mut [S]) {
        self.spmv_adjoint_into(x, y);
    }
}

impl<S: Scalar> LinearOperator<S> for DenseMatrix<S> {
    fn dim(&self) -> usize {
        self.n_rows()
    }

    fn apply(&self, x: &[S], y: &mut [S]) {
        self.matvec_into(x, y);
    }
}

impl<S: Scalar> AdjointOperator<S> for DenseMatrix<S> {
    fn apply_adjoint(&self, x: &[S], y: &mut [S]) {
        self.matvec_adjoint_into(x, y);
    }
}

impl<S: Scalar, T: LinearOperator<S> + ?Sized> LinearOperator<S> for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[S], y: &mut [S]) {
        (**self).apply(x, y)
    }

    fn cost(&self) -> usize {
        (**self).cost()
    }
}

impl<S: Scalar, T: AdjointOperator<S> + ?Sized> AdjointOperator<S> for &T {
    fn apply_adjoint(&self, x: &[S], y: &mut [S]) {
        (**self).apply_adjoint(x, y)
    }
}

/// The right-preconditioned operator `A M⁻¹`.
pub struct RightPreconditioned<'a, S, A: ?Sized, M: ?Sized> {
    a: &'a A,
    m: &'a M,
    _marker: std::marker::PhantomData<S>,
}

impl<'a, S: Scalar, A: LinearOperator<S> + ?Sized, M: Preconditioner<S> + ?Sized>
    RightPreconditioned<'a, S, A, M>
{
    pub fn new(a: &'a A, m: &'a M) -> Self {
        RightPreconditioned {
            a,
            m,
            _marker: std::marker::PhantomData,
        }
    }
}

impl<S: Scalar, A: LinearOperator<S> + ?Sized, M: Preconditioner<S> + ?Sized> LinearOperator<S>
    for RightPreconditioned<'_, S, A, M>
{
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn apply(&self, x: &[S], y: &mut [S]) {
        let mut t = vec![S::zero(); x.len()];
        self.m.solve(x, &mut t);
        self.a.apply(&t, y);
    }

    fn cost(&self) -> usize {
        self.a.cost()
    }
}
