//! Column-major dense matrices and the small direct solvers built on them.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::vector;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix<S> {
    n_rows: usize,
    n_cols: usize,
    values: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        DenseMatrix {
            n_rows,
            n_cols,
            values: vec![S::zero(); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut values = Vec::with_capacity(n_rows * n_cols);
        for j in 0..n_cols {
            for i in 0..n_rows {
                values.push(f(i, j));
            }
        }
        DenseMatrix {
            n_rows,
            n_cols,
            values,
        }
    }

    /// Row-major literal, convenient in tests.
    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        Self::from_fn(n_rows, n_cols, |i, j| rows[i][j])
    }

    pub fn from_columns(n_rows: usize, columns: &[Vec<S>]) -> Self {
        assert!(columns.iter().all(|c| c.len() == n_rows), "column length");
        DenseMatrix {
            n_rows,
            n_cols: columns.len(),
            values: columns.iter().flatten().copied().collect(),
        }
    }

    pub fn from_diagonal(diag: &[S]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn as_slice(&self) -> &[S] {
        &self.values
    }

    pub fn col(&self, j: usize) -> &[S] {
        &self.values[j * self.n_rows..(j + 1) * self.n_rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [S] {
        &mut self.values[j * self.n_rows..(j + 1) * self.n_rows]
    }

    pub fn columns(&self) -> Vec<Vec<S>> {
        (0..self.n_cols).map(|j| self.col(j).to_vec()).collect()
    }

    pub fn matvec(&self, x: &[S]) -> Result<Vec<S>> {
        check_dim(self.n_cols, x.len())?;
        let mut y = vec![S::zero(); self.n_rows];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    pub fn matvec_into(&self, x: &[S], y: &mut [S]) {
        y.iter_mut().for_each(|v| *v = S::zero());
        for (j, &xj) in x.iter().enumerate() {
            if xj != S::zero() {
                vector::axpy(xj, self.col(j), y);
            }
        }
    }

    /// `y = Aᴴ x`
    pub fn matvec_adjoint_into(&self, x: &[S], y: &mut [S]) {
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = vector::dot(self.col(j), x);
        }
    }

    pub fn matmul(&self, other: &DenseMatrix<S>) -> Result<DenseMatrix<S>> {
        check_dim(self.n_cols, other.n_rows)?;
        let mut out = DenseMatrix::zeros(self.n_rows, other.n_cols);
        for j in 0..other.n_cols {
            let (src, dst) = (other.col(j), &mut out.values[j * self.n_rows..(j + 1) * self.n_rows]);
            for (k, &b) in src.iter().enumerate() {
                if b != S::zero() {
                    vector::axpy(b, self.col(k), dst);
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> DenseMatrix<S> {
        DenseMatrix::from_fn(self.n_cols, self.n_rows, |i, j| self[(j, i)].conj())
    }

    /// Copy of rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> DenseMatrix<S> {
        DenseMatrix::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn sub(&self, other: &DenseMatrix<S>) -> DenseMatrix<S> {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        DenseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            values: vector::sub(&self.values, &other.values),
        }
    }

    pub fn norm_frobenius(&self) -> f64 {
        vector::norm(&self.values)
    }

    pub fn max_abs(&self) -> f64 {
        vector::max_abs(&self.values)
    }

    pub fn norm_one(&self) -> f64 {
        (0..self.n_cols)
            .map(|j| self.col(j).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> DenseMatrix<T> {
        DenseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn to_complex(&self) -> DenseMatrix<num_complex::Complex64> {
        self.map(|v| v.to_complex())
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<Lu<S>> {
        let n = self.n_rows;
        Lu::factor(self.clone(), n.saturating_sub(1), n.saturating_sub(1))
    }

    /// LU factorization that exploits known lower/upper bandwidths.
    pub fn lu_banded(&self, lower: usize, upper: usize) -> Result<Lu<S>> {
        Lu::factor(self.clone(), lower, upper)
    }
}

impl<S> Index<(usize, usize)> for DenseMatrix<S> {
    type Output = S;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        &self.values[j * self.n_rows + i]
    }
}

impl<S> IndexMut<(usize, usize)> for DenseMatrix<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        &mut self.values[j * self.n_rows + i]
    }
}

/// Relative pivot size below which a factorization is declared singular.
pub const SINGULAR_PIVOT_TOL: f64 = 1e-14;

/// `P A = L U` with unit-lower `L`, stored in place.
#[derive(Debug, Clone)]
pub struct Lu<S> {
    factors: DenseMatrix<S>,
    perm: Vec<usize>,
    /// Last row holding a nonzero multiplier, per column of `L`.
    l_last: Vec<usize>,
    /// First row holding a nonzero, per column of `U`.
    u_first: Vec<usize>,
}

impl<S: Scalar> Lu<S> {
    fn factor(mut a: DenseMatrix<S>, lower: usize, upper: usize) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidArgument("LU of a non-square matrix".into()));
        }
        let n = a.n_rows;
        let scale = a.max_abs();
        let tol = SINGULAR_PIVOT_TOL * scale.max(f64::MIN_POSITIVE);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let row_end = (k + lower).min(n - 1);
            let col_end = (k + lower + upper).min(n - 1);
            let mut p = k;
            let mut best = a[(k, k)].abs();
            for i in k + 1..=row_end {
                let v = a[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > tol) {
                return Err(Error::Singular {
                    index: k,
                    pivot: best,
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = tmp;
                }
            }
            let pivot = a[(k, k)];
            for i in k + 1..=row_end {
                let m = a[(i, k)] / pivot;
                a[(i, k)] = m;
            }
            for j in k + 1..=col_end {
                let akj = a[(k, j)];
                if akj == S::zero() {
                    continue;
                }
                for i in k + 1..=row_end {
                    let m = a[(i, k)];
                    a[(i, j)] -= m * akj;
                }
            }
        }
        let l_last = (0..n)
            .map(|k| {
                (k + 1..n)
                    .rev()
                    .find(|&i| a[(i, k)] != S::zero())
                    .unwrap_or(k)
            })
            .collect();
        let u_first = (0..n)
            .map(|j| (0..j).find(|&i| a[(i, j)] != S::zero()).unwrap_or(j))
            .collect();
        Ok(Lu {
            factors: a,
            perm,
            l_last,
            u_first,
        })
    }

    pub fn order(&self) -> usize {
        self.factors.n_rows
    }

    pub fn solve(&self, rhs: &[S]) -> Result<Vec<S>> {
        check_dim(self.order(), rhs.len())?;
        let mut x: Vec<S> = self.perm.iter().map(|&p| rhs[p]).collect();
        self.solve_permuted_in_place(&mut x);
        Ok(x)
    }

    fn solve_permuted_in_place(&self, x: &mut [S]) {
        let n = self.order();
        let f = &self.factors;
        for k in 0..n {
            let xk = x[k];
            if xk == S::zero() {
                continue;
            }
            let col = f.col(k);
            for i in k + 1..=self.l_last[k] {
                x[i] -= col[i] * xk;
            }
        }
        for j in (0..n).rev() {
            let col = f.col(j);
            x[j] /= col[j];
            let xj = x[j];
            if xj == S::zero() {
                continue;
            }
            for i in self.u_first[j]..j {
                x[i] -= col[i] * xj;
            }
        }
    }

    /// Smallest and largest absolute pivots of `U`.
    pub fn pivot_range(&self) -> (f64, f64) {
        (0..self.order()).fold((f64::INFINITY, 0.0), |(lo, hi), i| {
            let v = self.factors[(i, i)].abs();
            (lo.min(v), hi.max(v))
        })
    }

    pub fn inverse(&self) -> DenseMatrix<S> {
        let n = self.order();
        let mut inv = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let e = vector::unit(n, j);
            let x = self.solve(&e).expect("dimension matches");
            inv.col_mut(j).copy_from_slice(&x);
        }
        inv
    }
}

/// Solves `G d = rhs` for a small dense `G`.
pub fn solve_small_dense<S: Scalar>(g: &DenseMatrix<S>, rhs: &[S]) -> Result<Vec<S>> {
    check_dim(g.n_rows(), rhs.len())?;
    g.lu()?.solve(rhs)
}

/// Reduces a square matrix to upper Hessenberg form by Householder
/// similarity transformations (eigenvalues only; the transform is dropped).
pub fn hessenberg_reduce<S: Scalar>(a: &DenseMatrix<S>) -> DenseMatrix<S> {
    let n = a.n_rows();
    let mut h = a.clone();
    if n < 3 {
        return h;
    }
    let mut v = vec![S::zero(); n];
    for k in 0..n - 2 {
        let alpha_norm = vector::norm(&h.col(k)[k + 1..]);
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.abs() == 0.0 {
            S::one()
        } else {
            x0.scale(1.0 / x0.abs())
        };
        // v = x + phase*‖x‖ e1 avoids cancellation.
        let m = n - k - 1;
        v[..m].copy_from_slice(&h.col(k)[k + 1..]);
        v[0] += phase.scale(alpha_norm);
        let vnorm = vector::norm(&v[..m]);
        if vnorm == 0.0 {
            continue;
        }
        vector::scale_real(1.0 / vnorm, &mut v[..m]);
        let vk = &v[..m];
        // Left: H[k+1.., k..] -= 2 v (vᴴ H)
        for j in k..n {
            let col = &mut h.col_mut(j)[k + 1..];
            let w = vector::dot(vk, col).scale(2.0);
            vector::axpy(-w, vk, col);
        }
        // Right: H[.., k+1..] -= 2 (H v) vᴴ
        let mut hv = vec![S::zero(); n];
        for (t, &vt) in vk.iter().enumerate() {
            vector::axpy(vt, h.col(k + 1 + t), &mut hv);
        }
        for (t, &vt) in vk.iter().enumerate() {
            let coef = vt.conj().scale(2.0);
            let col = h.col_mut(k + 1 + t);
            vector::axpy(-coef, &hv, col);
        }
        for i in k + 2..n {
            h[(i, k)] = S::zero();
        }
    }
    h
}
