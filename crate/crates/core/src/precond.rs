//! Incomplete LU factorization without fill-in.

use crate::error::{check_dim, Error, Result};
use crate::linalg::operator::Preconditioner;
use crate::linalg::sparse::SparseMatrix;
use crate::scalar::Scalar;

/// Pivots below this fraction of the row's 1-norm are rejected.
pub const PIVOT_TOL: f64 = 1e-14;

/// ILU(0) factors stored in one CSR array on the pattern of `A`: the strict
/// lower part holds `L` (unit diagonal implied), the rest holds `U`.
#[derive(Debug, Clone)]
pub struct Ilu0Factors<S> {
    lu: SparseMatrix<S>,
    diag_pos: Vec<usize>,
}

/// IKJ-ordered ILU(0): only positions present in the pattern of `A` are
/// ever updated.
pub fn ilu0<S: Scalar>(a: &SparseMatrix<S>) -> Result<Ilu0Factors<S>> {
    if !a.is_square() {
        return Err(Error::InvalidArgument("ILU(0) of a non-square matrix".into()));
    }
    let n = a.n_rows();
    let row_ptr = a.row_ptr();
    let col_idx = a.col_idx();
    let mut values = a.values().to_vec();
    let mut diag_pos = vec![usize::MAX; n];
    for i in 0..n {
        for k in row_ptr[i]..row_ptr[i + 1] {
            if col_idx[k] == i {
                diag_pos[i] = k;
            }
        }
        if diag_pos[i] == usize::MAX {
            return Err(Error::ZeroPivot { row: i });
        }
    }
    let mut position = vec![usize::MAX; n];
    for i in 0..n {
        let row = row_ptr[i]..row_ptr[i + 1];
        let row_norm: f64 = values[row.clone()].iter().map(|v| v.abs()).sum();
        for k in row.clone() {
            position[col_idx[k]] = k;
        }
        for kk in row.clone() {
            let k = col_idx[kk];
            if k >= i {
                break;
            }
            let factor = values[kk] / values[diag_pos[k]];
            values[kk] = factor;
            for jj in diag_pos[k] + 1..row_ptr[k + 1] {
                let p = position[col_idx[jj]];
                if p != usize::MAX {
                    let ukj = values[jj];
                    values[p] -= factor * ukj;
                }
            }
        }
        for k in row {
            position[col_idx[k]] = usize::MAX;
        }
        let pivot = values[diag_pos[i]].abs();
        if !(pivot > PIVOT_TOL * row_norm) {
            return Err(Error::ZeroPivot { row: i });
        }
    }
    let lu = SparseMatrix::from_csr(n, n, row_ptr.to_vec(), col_idx.to_vec(), values)?;
    Ok(Ilu0Factors { lu, diag_pos })
}

impl<S: Scalar> Ilu0Factors<S> {
    pub fn dim(&self) -> usize {
        self.lu.n_rows()
    }

    /// Unit lower triangular factor.
    pub fn l(&self) -> SparseMatrix<S> {
        let n = self.dim();
        let mut triplets = Vec::new();
        for i in 0..n {
            for (j, v) in self.lu.row(i) {
                if j < i {
                    triplets.push((i, j, v));
                }
            }
            triplets.push((i, i, S::one()));
        }
        SparseMatrix::from_triplets(n, n, triplets).expect("indices in range")
    }

    /// Upper triangular factor.
    pub fn u(&self) -> SparseMatrix<S> {
        let n = self.dim();
        let triplets = (0..n)
            .flat_map(|i| self.lu.row(i).filter(move |&(j, _)| j >= i).map(move |(j, v)| (i, j, v)))
            .collect::<Vec<_>>();
        SparseMatrix::from_triplets(n, n, triplets).expect("indices in range")
    }

    /// `(LU)⁻¹ v` by forward and backward substitution.
    pub fn solve(&self, v: &[S]) -> Result<Vec<S>> {
        check_dim(self.dim(), v.len())?;
        let mut y = vec![S::zero(); v.len()];
        self.solve_into(v, &mut y);
        Ok(y)
    }

    fn solve_into(&self, v: &[S], y: &mut [S]) {
        let n = self.dim();
        let row_ptr = self.lu.row_ptr();
        let col_idx = self.lu.col_idx();
        let values = self.lu.values();
        for i in 0..n {
            let mut acc = v[i];
            for k in row_ptr[i]..self.diag_pos[i] {
                acc -= values[k] * y[col_idx[k]];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for k in self.diag_pos[i] + 1..row_ptr[i + 1] {
                acc -= values[k] * y[col_idx[k]];
            }
            y[i] = acc / values[self.diag_pos[i]];
        }
    }
}

impl<S: Scalar> Preconditioner<S> for Ilu0Factors<S> {
    fn dim(&self) -> usize {
        self.lu.n_rows()
    }

    fn solve(&self, x: &[S], y: &mut [S]) {
        self.solve_into(x, y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;
    use crate::matrices::gen_convdiff_2d;

    #[test]
    fn upper_triangular_is_its_own_factor() {
        let a = SparseMatrix::from_triplets(3, 3, vec![(0, 0, 2.0), (0, 2, 1.0), (1, 1, 3.0), (2, 2, 4.0)]).unwrap();
        let f = ilu0(&a).unwrap();
        assert_eq!(f.u(), a);
        assert_eq!(f.l(), SparseMatrix::identity(3));
        let x = f.solve(&[3.0, 3.0, 4.0]).unwrap();
        assert_eq!(x, vec![1.0, 1.0, 1.0]);
        assert_eq!(f.solve(&[0.0; 3]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn laplacian_matches_on_pattern_only() {
        let a = gen_convdiff_2d(4, 0.0, 0.0, 0.0).unwrap();
        let f = ilu0(&a).unwrap();
        let lu = f.l().to_dense().matmul(&f.u().to_dense()).unwrap();
        let ad = a.to_dense();
        let mut on = 0.0f64;
        let mut off = 0.0f64;
        for i in 0..16 {
            for j in 0..16 {
                let d = (lu[(i, j)] - ad[(i, j)]).abs();
                if a.get(i, j) != 0.0 {
                    on = on.max(d);
                } else {
                    off = off.max(d);
                }
            }
        }
        assert!(on <= 1e-12);
        assert!(off > 0.0);
    }

    #[test]
    fn missing_diagonal_is_a_zero_pivot() {
        let a = SparseMatrix::from_triplets(2, 2, vec![(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        assert!(matches!(ilu0(&a), Err(Error::ZeroPivot { row: 0 })));
    }

    #[test]
    fn tridiagonal_is_exact() {
        let a = crate::matrices::gen_convdiff_1d(6, 3.0, 1.0).unwrap();
        let f = ilu0(&a).unwrap();
        let b = [1.0, 2.0, 0.0, -1.0, 0.5, 3.0];
        let x = f.solve(&b).unwrap();
        let r = vector::sub(&b, &a.spmv(&x).unwrap());
        assert!(vector::norm(&r) < 1e-12);
    }
}
