//! Least squares with upper Hessenberg matrices by progressive Givens rotations.

use crate::error::{check_dim, Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::scalar::Scalar;

/// Rotation `G = [c s; -s̄ c]` with `G [a; b] = [r; 0]`.
pub fn givens<S: Scalar>(a: S, b: S) -> (f64, S, S) {
    let na = a.abs();
    let nb = b.abs();
    if nb == 0.0 {
        return (1.0, S::zero(), a);
    }
    if na == 0.0 {
        return (0.0, S::one(), b);
    }
    let r = na.hypot(nb);
    let phase = a.scale(1.0 / na);
    let c = na / r;
    let s = phase * b.conj().scale(1.0 / r);
    (c, s, phase.scale(r))
}

/// Incremental QR of the `(k+1) x k` Hessenberg matrix built by Arnoldi,
/// tracking the rotated right-hand side `beta e_1`.
#[derive(Debug, Clone)]
pub struct HessenbergLsq<S> {
    rotations: Vec<(f64, S)>,
    /// Columns of the triangular factor, column `j` holds `j + 1` entries.
    r: Vec<Vec<S>>,
    g: Vec<S>,
}

impl<S: Scalar> HessenbergLsq<S> {
    pub fn new(beta: f64) -> Self {
        HessenbergLsq {
            rotations: Vec::new(),
            r: Vec::new(),
            g: vec![S::from_f64(beta)],
        }
    }

    pub fn columns(&self) -> usize {
        self.r.len()
    }

    /// Appends column `j` of H (length `j + 2`) and returns the current
    /// least squares residual norm.
    pub fn push_column(&mut self, mut h: Vec<S>) -> f64 {
        let j = self.r.len();
        debug_assert_eq!(h.len(), j + 2);
        for (i, &(c, s)) in self.rotations.iter().enumerate() {
            let a = h[i];
            let b = h[i + 1];
            h[i] = a.scale(c) + s * b;
            h[i + 1] = b.scale(c) - s.conj() * a;
        }
        let (c, s, r) = givens(h[j], h[j + 1]);
        h[j] = r;
        h.truncate(j + 1);
        self.rotations.push((c, s));
        self.r.push(h);
        let gj = self.g[j];
        self.g[j] = gj.scale(c);
        self.g.push(-(s.conj() * gj));
        self.residual()
    }

    pub fn residual(&self) -> f64 {
        self.g.last().map(|v| v.abs()).unwrap_or(0.0)
    }

    /// Back substitution for the minimizer `y`.
    pub fn solve(&self) -> Result<Vec<S>> {
        let k = self.r.len();
        let scale = self
            .r
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let mut y = self.g[..k].to_vec();
        for j in (0..k).rev() {
            let d = self.r[j][j];
            if d.abs() <= 1e-300 || d.abs() <= f64::EPSILON * 1e-4 * scale {
                return Err(Error::Singular {
                    index: j,
                    pivot: d.abs(),
                });
            }
            y[j] = y[j] / d;
            let yj = y[j];
            for i in 0..j {
                y[i] -= self.r[j][i] * yj;
            }
        }
        Ok(y)
    }
}

/// Minimizes `‖beta e_1 - H y‖₂` for an upper Hessenberg `H` with one more
/// row than columns. Returns the minimizer and the residual norm.
pub fn least_squares_hessenberg<S: Scalar>(h: &DenseMatrix<S>, beta: f64) -> Result<(Vec<S>, f64)> {
    let mut rhs = vec![S::zero(); h.n_rows()];
    if let Some(first) = rhs.first_mut() {
        *first = S::from_f64(beta);
    }
    hessenberg_least_squares_rhs(h, &rhs)
}

/// Minimizes `‖rhs - H y‖₂` for a general right-hand side.
pub fn hessenberg_least_squares_rhs<S: Scalar>(h: &DenseMatrix<S>, rhs: &[S]) -> Result<(Vec<S>, f64)> {
    let m = h.n_rows();
    let k = h.n_cols();
    check_dim(k + 1, m)?;
    check_dim(m, rhs.len())?;
    let mut g = rhs.to_vec();
    let mut r = h.clone();
    for j in 0..k {
        let (c, s, rr) = givens(r[(j, j)], r[(j + 1, j)]);
        r[(j, j)] = rr;
        r[(j + 1, j)] = S::zero();
        for col in j + 1..k {
            let a = r[(j, col)];
            let b = r[(j + 1, col)];
            r[(j, col)] = a.scale(c) + s * b;
            r[(j + 1, col)] = b.scale(c) - s.conj() * a;
        }
        let a = g[j];
        let b = g[j + 1];
        g[j] = a.scale(c) + s * b;
        g[j + 1] = b.scale(c) - s.conj() * a;
    }
    let scale = r.max_abs();
    let mut y = g[..k].to_vec();
    for j in (0..k).rev() {
        let d = r[(j, j)];
        if d.abs() == 0.0 || d.abs() <= f64::EPSILON * 1e-4 * scale {
            return Err(Error::Singular {
                index: j,
                pivot: d.abs(),
            });
        }
        y[j] = y[j] / d;
        let yj = y[j];
        for i in 0..j {
            y[i] -= r[(i, j)] * yj;
        }
    }
    Ok((y, g[k].abs()))
}
