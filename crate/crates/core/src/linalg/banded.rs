//! LU factorization of sparse banded matrices with partial pivoting.

use crate::error::{check_dim, Error, Result};
use crate::linalg::dense::SINGULAR_PIVOT_TOL;
use crate::linalg::sparse::SparseMatrix;
use crate::scalar::Scalar;

/// Row of the factor: entries for columns `start..start + values.len()`.
#[derive(Debug, Clone)]
struct Row<S> {
    start: usize,
    values: Vec<S>,
}

impl<S: Scalar> Row<S> {
    fn get(&self, j: usize) -> S {
        if j < self.start {
            return S::zero();
        }
        self.values.get(j - self.start).copied().unwrap_or(S::zero())
    }

    fn end(&self) -> usize {
        self.start + self.values.len()
    }
}

/// `P A = L U` stored row by row. Memory is `O(n (2 kl + ku))` for lower and
/// upper bandwidths `kl`, `ku`.
#[derive(Debug, Clone)]
pub struct BandLu<S> {
    rows: Vec<Row<S>>,
    perm: Vec<usize>,
}

impl<S: Scalar> BandLu<S> {
    pub fn factor(a: &SparseMatrix<S>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidArgument("LU of a non-square matrix".into()));
        }
        let n = a.n_rows();
        let (kl, _) = a.bandwidths();
        let scale = a.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = SINGULAR_PIVOT_TOL * scale.max(f64::MIN_POSITIVE);
        let mut rows: Vec<Row<S>> = (0..n)
            .map(|i| {
                let entries: Vec<(usize, S)> = a.row(i).collect();
                let start = entries.first().map_or(i, |e| e.0.min(i));
                let end = entries.last().map_or(i + 1, |e| (e.0 + 1).max(i + 1));
                let mut values = vec![S::zero(); end - start];
                for (j, v) in entries {
                    values[j - start] = v;
                }
                Row { start, values }
            })
            .collect();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let (p, best) = (k..=last)
                .map(|r| (r, rows[r].get(k).abs()))
                .fold((k, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
            if best <= tol {
                return Err(Error::Singular { index: k, pivot: best });
            }
            rows.swap(k, p);
            perm.swap(k, p);
            let (head, tail) = rows.split_at_mut(k + 1);
            let pivot_row = &head[k];
            let pivot = pivot_row.get(k);
            for row in tail.iter_mut().take(last - k) {
                let ark = row.get(k);
                if row.start > k || ark == S::zero() {
                    continue;
                }
                let m = ark / pivot;
                row.values[k - row.start] = m;
                if row.end() < pivot_row.end() {
                    row.values.resize(pivot_row.end() - row.start, S::zero());
                }
                for j in k + 1..pivot_row.end() {
                    let u = pivot_row.values[j - pivot_row.start];
                    row.values[j - row.start] -= m * u;
                }
            }
        }
        Ok(BandLu { rows, perm })
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn solve(&self, b: &[S]) -> Result<Vec<S>> {
        let n = self.order();
        check_dim(n, b.len())?;
        let mut y: Vec<S> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.rows[i];
            let mut acc = y[i];
            for j in row.start..i {
                acc -= row.values[j - row.start] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let row = &self.rows[i];
            let mut acc = y[i];
            for j in i + 1..row.end() {
                acc -= row.values[j - row.start] * y[j];
            }
            y[i] = acc / row.values[i - row.start];
        }
        Ok(y)
    }
}
