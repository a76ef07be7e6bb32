use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::operator::LinearOperator;
use crate::linalg::vector;
use crate::scalar::Scalar;

/// Lucky breakdown threshold for `h_{j+1,j}` relative to the running
/// estimate of `‖A‖`.
pub const BREAKDOWN_TOL: f64 = 1e-14;

/// Arnoldi relation `A V_k = V_{k+1} H_{k+1,k}`.
///
/// After a lucky breakdown the basis holds only `k` vectors, the last row of
/// `H` is zero and `invariant` is set.
#[derive(Debug, Clone)]
pub struct KrylovDecomposition<S> {
    pub basis: Vec<Vec<S>>,
    pub h: DenseMatrix<S>,
    pub beta: f64,
    pub invariant: bool,
}

impl<S: Scalar> KrylovDecomposition<S> {
    pub fn steps(&self) -> usize {
        self.h.n_cols()
    }

    /// The square part `H_{k,k}`.
    pub fn h_square(&self) -> DenseMatrix<S> {
        let k = self.steps();
        self.h.block(0, k, 0, k)
    }

    pub fn basis_matrix(&self) -> DenseMatrix<S> {
        let n = self.basis.first().map_or(0, Vec::len);
        DenseMatrix::from_columns(n, &self.basis)
    }
}

/// Incremental Arnoldi process with modified Gram–Schmidt and one full
/// reorthogonalization pass at every step.
pub struct Arnoldi<'a, S: Scalar, A: LinearOperator<S> + ?Sized> {
    op: &'a A,
    basis: Vec<Vec<S>>,
    columns: Vec<Vec<S>>,
    beta: f64,
    anorm: f64,
    invariant: bool,
}

impl<'a, S: Scalar, A: LinearOperator<S> + ?Sized> Arnoldi<'a, S, A> {
    pub fn new(op: &'a A, b: &[S]) -> Result<Self> {
        crate::error::check_dim(op.dim(), b.len())?;
        let beta = vector::norm(b);
        if beta == 0.0 {
            return Err(Error::ZeroVector);
        }
        let mut v = b.to_vec();
        vector::scale_real(1.0 / beta, &mut v);
        Ok(Arnoldi {
            op,
            basis: vec![v],
            columns: Vec::new(),
            beta,
            anorm: 0.0,
            invariant: false,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn steps(&self) -> usize {
        self.columns.len()
    }

    pub fn is_invariant(&self) -> bool {
        self.invariant
    }

    pub fn basis(&self) -> &[Vec<S>] {
        &self.basis
    }

    /// Performs one step and returns the new Hessenberg column (length
    /// `j + 2`). Returns `None` once an invariant subspace has been found.
    pub fn step(&mut self) -> Option<&[S]> {
        if self.invariant {
            return None;
        }
        let j = self.columns.len();
        let mut w = self.op.apply_vec(&self.basis[j]);
        self.anorm = self.anorm.max(vector::norm(&w));
        let mut h = vec![S::zero(); j + 2];
        for _pass in 0..2 {
            for (i, v) in self.basis.iter().enumerate() {
                let c = vector::dot(v, &w);
                h[i] += c;
                vector::axpy(-c, v, &mut w);
            }
        }
        let next = vector::norm(&w);
        h[j + 1] = S::from_f64(next);
        if next <= BREAKDOWN_TOL * self.anorm {
            h[j + 1] = S::zero();
            self.invariant = true;
        } else {
            vector::scale_real(1.0 / next, &mut w);
            self.basis.push(w);
        }
        self.columns.push(h);
        self.columns.last().map(Vec::as_slice)
    }

    /// `x = V_k y`.
    pub fn combine(&self, y: &[S]) -> Vec<S> {
        let n = self.basis[0].len();
        let mut x = vec![S::zero(); n];
        for (v, &c) in self.basis.iter().zip(y) {
            vector::axpy(c, v, &mut x);
        }
        x
    }

    pub fn into_decomposition(self) -> KrylovDecomposition<S> {
        let k = self.columns.len();
        let mut h = DenseMatrix::zeros(k + 1, k);
        for (j, col) in self.columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                h[(i, j)] = v;
            }
        }
        KrylovDecomposition {
            basis: self.basis,
            h,
            beta: self.beta,
            invariant: self.invariant,
        }
    }
}

/// Runs `k` Arnoldi steps (fewer after a lucky breakdown).
pub fn arnoldi<S: Scalar, A: LinearOperator<S> + ?Sized>(
    op: &A,
    b: &[S],
    k: usize,
) -> Result<KrylovDecomposition<S>> {
    if k == 0 || k > op.dim() {
        return Err(Error::InvalidArgument(format!(
            "Arnoldi steps must be in 1..={}, got {k}",
            op.dim()
        )));
    }
    let mut process = Arnoldi::new(op, b)?;
    for _ in 0..k {
        if process.step().is_none() {
            break;
        }
    }
    Ok(process.into_decomposition())
}
