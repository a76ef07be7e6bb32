//! Singular values and Hermitian eigenproblems for desk-scale dense matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::vector;
use crate::scalar::Scalar;

const JACOBI_MAX_SWEEPS: usize = 80;

/// Singular values in nonincreasing order (one-sided Jacobi).
pub fn singular_values<S: Scalar>(a: &DenseMatrix<S>) -> Result<Vec<f64>> {
    if !a.is_finite() {
        return Err(Error::InvalidArgument("non-finite matrix entries".into()));
    }
    let work = if a.n_rows() >= a.n_cols() {
        a.clone()
    } else {
        a.adjoint()
    };
    let m = work.n_rows();
    let n = work.n_cols();
    let mut cols: Vec<Vec<S>> = work.columns();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|v| v.abs_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|v| v.abs_sqr()).sum();
                let gamma = vector::dot(&cols[p], &cols[q]);
                let g = gamma.abs();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotate column q by the phase of gamma so the pair is real
                // and positive.
                let phase = gamma.scale(1.0 / g).conj();
                vector::scale(phase, &mut cols[q]);
                let zeta = (beta - alpha) / (2.0 * g);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let ap = cols[p][i];
                    let aq = cols[q][i];
                    cols[p][i] = ap.scale(c) - aq.scale(s);
                    cols[q][i] = ap.scale(s) + aq.scale(c);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = cols.iter().map(|c| vector::norm(c)).collect();
    s.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    Ok(s)
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a real symmetric
/// matrix by cyclic Jacobi rotations.
pub fn symmetric_eigen(a: &DenseMatrix<f64>) -> Result<(Vec<f64>, DenseMatrix<f64>)> {
    if !a.is_square() {
        return Err(Error::InvalidArgument("non-square symmetric matrix".into()));
    }
    let n = a.n_rows();
    let mut m = a.clone();
    let mut v = DenseMatrix::<f64>::identity(n);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|j| (0..n).filter(move |&i| i != j).map(move |i| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        let diag: f64 = (0..n).map(|i| m[(i, i)] * m[(i, i)]).sum();
        if off <= (f64::EPSILON * f64::EPSILON) * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).expect("finite"));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((values, vectors))
}

/// Eigenvalues (ascending) of a Hermitian matrix, with eigenvectors.
///
/// Uses the real symmetric embedding `[[Re, -Im], [Im, Re]]`, whose spectrum
/// is the Hermitian spectrum with every value doubled.
pub fn hermitian_eigen<S: Scalar>(a: &DenseMatrix<S>) -> Result<(Vec<f64>, DenseMatrix<Complex64>)> {
    let n = a.n_rows();
    if !S::IS_COMPLEX {
        let real = a.map(|v| v.re());
        let (vals, vecs) = symmetric_eigen(&real)?;
        return Ok((vals, vecs.to_complex()));
    }
    let big = DenseMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let z = a[(i % n, j % n)];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re(),
            (0, 1) => -z.im(),
            _ => z.im(),
        }
    });
    let (vals, vecs) = symmetric_eigen(&big)?;
    // Each eigenvalue appears twice; keep every other one and build the
    // complex vector from the first copy, orthogonalized within clusters.
    let mut values: Vec<f64> = Vec::with_capacity(n);
    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    for k in 0..2 * n {
        let mut x: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(vecs[(i, k)], vecs[(i + n, k)]))
            .collect();
        for (j, y) in vectors.iter().enumerate() {
            if (values[j] - vals[k]).abs() <= 1e-9 * scale {
                let proj = vector::dot(y, &x);
                vector::axpy(-proj, y, &mut x);
            }
        }
        let nx = vector::norm(&x);
        if nx > 0.5 && values.len() < n {
            vector::scale_real(1.0 / nx, &mut x);
            values.push(vals[k]);
            vectors.push(x);
        }
    }
    if values.len() != n {
        return Err(Error::InvalidArgument("matrix is not Hermitian".into()));
    }
    Ok((values, DenseMatrix::from_columns(n, &vectors)))
}

/// Spectral norm `‖A‖₂`.
///
/// Small matrices use the full singular value computation; larger ones run
/// Lanczos with full reorthogonalization on `AᴴA`, which resolves the largest
/// singular value to working precision in a few dozen steps.
pub fn spectral_norm<S: Scalar>(a: &DenseMatrix<S>) -> Result<f64> {
    if a.n_rows().min(a.n_cols()) <= 200 {
        return Ok(singular_values(a)?.first().copied().unwrap_or(0.0));
    }
    Ok(lanczos_largest_gram(a)?.sqrt())
}

fn lanczos_largest_gram<S: Scalar>(a: &DenseMatrix<S>) -> Result<f64> {
    let n = a.n_cols();
    let max_steps = n.min(160);
    let mut basis: Vec<Vec<S>> = Vec::new();
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut v: Vec<S> = (0..n)
        .map(|i| S::from_f64(1.0 + ((i * 2654435761usize) % 1000) as f64 / 1000.0))
        .collect();
    let nv = vector::norm(&v);
    vector::scale_real(1.0 / nv, &mut v);
    let mut av = vec![S::zero(); a.n_rows()];
    let mut w = vec![S::zero(); n];
    let mut previous = 0.0;
    let mut stable = 0;
    for step in 0..max_steps {
        a.matvec_into(&v, &mut av);
        a.matvec_adjoint_into(&av, &mut w);
        let alpha = vector::dot(&v, &w).re();
        basis.push(v.clone());
        alphas.push(alpha);
        for _ in 0..2 {
            for q in &basis {
                let proj = vector::dot(q, &w);
                vector::axpy(-proj, q, &mut w);
            }
        }
        let beta = vector::norm(&w);
        let k = alphas.len();
        let t = DenseMatrix::from_fn(k, k, |i, j| {
            if i == j {
                alphas[i]
            } else if i == j + 1 || j == i + 1 {
                betas[i.min(j)]
            } else {
                0.0
            }
        });
        let (vals, _) = symmetric_eigen(&t)?;
        let largest = *vals.last().expect("nonempty");
        if step > 5 && (largest - previous).abs() <= 1e-15 * largest {
            stable += 1;
            if stable >= 3 {
                return Ok(largest);
            }
        } else {
            stable = 0;
        }
        previous = largest;
        if beta <= 1e-14 * largest.max(f64::MIN_POSITIVE) {
            return Ok(largest);
        }
        betas.push(beta);
        v = w.iter().map(|x| x.scale(1.0 / beta)).collect();
    }
    Ok(previous)
}
