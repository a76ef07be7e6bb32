//! Independent reference routines for the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use polyinv::linalg::{DenseMatrix, SparseMatrix};
use polyinv::rng::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Row-major complex copy of a dense matrix.
pub fn to_rows(a: &DenseMatrix<f64>) -> Vec<Vec<Complex64>> {
    (0..a.n_rows())
        .map(|i| (0..a.n_cols()).map(|j| c(a[(i, j)], 0.0)).collect())
        .collect()
}

pub fn sparse_rows(a: &SparseMatrix<f64>) -> Vec<Vec<Complex64>> {
    to_rows(&a.to_dense())
}

pub fn identity(n: usize) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|i| (0..n).map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect()
}

pub fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect())
        .collect()
}

pub fn matvec(a: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn add_scaled(a: &[Vec<Complex64>], alpha: Complex64, b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + alpha * y).collect())
        .collect()
}

/// Gauss–Jordan elimination with partial pivoting on `[A | B]`; returns `A⁻¹ B`.
pub fn solve_many(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    let m = b[0].len();
    let mut aug: Vec<Vec<Complex64>> = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().chain(rb.iter()).copied().collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| aug[i][col].norm().partial_cmp(&aug[j][col].norm()).unwrap())
            .unwrap();
        aug.swap(col, piv);
        let d = aug[col][col];
        assert!(d.norm() > 0.0, "singular matrix in reference solver");
        for v in aug[col].iter_mut() {
            *v /= d;
        }
        for i in 0..n {
            if i != col {
                let f = aug[i][col];
                if f.norm() != 0.0 {
                    for j in col..n + m {
                        let t = aug[col][j];
                        aug[i][j] -= f * t;
                    }
                }
            }
        }
    }
    aug.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn solve(a: &[Vec<Complex64>], b: &[Complex64]) -> Vec<Complex64> {
    let cols: Vec<Vec<Complex64>> = b.iter().map(|&v| vec![v]).collect();
    solve_many(a, &cols).into_iter().map(|r| r[0]).collect()
}

pub fn inverse(a: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    solve_many(a, &identity(a.len()))
}

/// Determinant by elimination with partial pivoting.
pub fn det(a: &[Vec<Complex64>]) -> Complex64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = c(1.0, 0.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].norm().partial_cmp(&m[j][col].norm()).unwrap())
            .unwrap();
        if piv != col {
            m.swap(col, piv);
            d = -d;
        }
        let p = m[col][col];
        if p.norm() == 0.0 {
            return c(0.0, 0.0);
        }
        d *= p;
        for i in col + 1..n {
            let f = m[i][col] / p;
            for j in col..n {
                let t = m[col][j];
                m[i][j] -= f * t;
            }
        }
    }
    d
}

pub fn vnorm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn adjoint(a: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let (n, m) = (a.len(), a[0].len());
    (0..m).map(|j| (0..n).map(|i| a[i][j].conj()).collect()).collect()
}

/// 2-norm by power iteration on `BᴴB` from a fixed start, run to a
/// stationary Rayleigh quotient.
pub fn spectral_norm(b: &[Vec<Complex64>]) -> f64 {
    let bh = adjoint(b);
    let m = b[0].len();
    let mut x: Vec<Complex64> = (0..m).map(|i| c(1.0 + 0.1 * i as f64, 0.3 - 0.05 * i as f64)).collect();
    let mut est = 0.0;
    for _ in 0..5000 {
        let y = matvec(&bh, &matvec(b, &x));
        let ny = vnorm(&y);
        if ny == 0.0 {
            return 0.0;
        }
        let next = ny / vnorm(&x);
        x = y.iter().map(|z| z / ny).collect();
        if (next - est).abs() <= 1e-15 * next {
            est = next;
            break;
        }
        est = next;
    }
    est.sqrt()
}

pub fn random_dense(rng: &mut Rng, n: usize, shift: f64) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(n, n, |i, j| rng.normal() + if i == j { shift } else { 0.0 })
}

pub fn random_vec(rng: &mut Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.normal()).collect()
}

pub fn unit_random(rng: &mut Rng, n: usize) -> Vec<f64> {
    let v = random_vec(rng, n);
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / nv).collect()
}

pub fn real_vec(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| c(v, 0.0)).collect()
}

/// `∏ (1 - z/θ)` evaluated factor by factor.
pub fn pi_at(roots: &[Complex64], z: Complex64) -> Complex64 {
    roots.iter().map(|t| 1.0 - z / t).product()
}
