//! Eigenvalues of small dense matrices by QR iteration on the Hessenberg form.
//!
//! Real matrices use the Francis double-shift iteration in real arithmetic,
//! so complex eigenvalues come out as exact (bitwise) conjugate pairs.
//! Complex matrices use single-shift QR with a Wilkinson shift.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::dense::{hessenberg_reduce, DenseMatrix};
use crate::linalg::vector;
use crate::scalar::Scalar;

/// Subdiagonal deflation threshold relative to the neighbouring diagonal.
pub const DEFLATION_EPS: f64 = 1e-15;
/// QR sweeps allowed per eigenvalue before giving up.
pub const MAX_SWEEPS_PER_EIGENVALUE: usize = 40;

/// Eigenvalues of an upper Hessenberg matrix.
pub fn hessenberg_eigenvalues<S: Scalar>(h: &DenseMatrix<S>) -> Result<Vec<Complex64>> {
    if !h.is_square() {
        return Err(Error::InvalidArgument(
            "eigenvalues of a non-square matrix".into(),
        ));
    }
    if !h.is_finite() {
        return Err(Error::InvalidArgument("non-finite matrix entries".into()));
    }
    let n = h.n_rows();
    if S::IS_COMPLEX {
        let mut a: Vec<Vec<Complex64>> = (0..n)
            .map(|i| (0..n).map(|j| h[(i, j)].to_complex()).collect())
            .collect();
        complex_hessenberg_qr(&mut a)
    } else {
        let mut a: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| h[(i, j)].re()).collect())
            .collect();
        real_hessenberg_qr(&mut a)
    }
}

/// Eigenvalues of a general square matrix.
pub fn eigenvalues<S: Scalar>(a: &DenseMatrix<S>) -> Result<Vec<Complex64>> {
    hessenberg_eigenvalues(&hessenberg_reduce(a))
}

fn deflation_point(a: &[Vec<f64>], lo: usize, hi: usize, anorm: f64) -> usize {
    let mut l = hi;
    while l > lo {
        let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
        if s == 0.0 {
            s = anorm;
        }
        if a[l][l - 1].abs() <= DEFLATION_EPS * s {
            break;
        }
        l -= 1;
    }
    l
}

/// Francis double-shift QR on a row-major real Hessenberg matrix.
fn real_hessenberg_qr(a: &mut [Vec<f64>]) -> Result<Vec<Complex64>> {
    let n = a.len();
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(eig);
    }
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut shift_acc = 0.0;
    let mut its = 0usize;
    while nn >= 0 {
        let hi = nn as usize;
        let l = deflation_point(a, 0, hi, anorm);
        if l > 0 {
            a[l][l - 1] = 0.0;
        }
        let x = a[hi][hi];
        if l == hi {
            eig[hi] = Complex64::new(x + shift_acc, 0.0);
            nn -= 1;
            its = 0;
            continue;
        }
        let y = a[hi - 1][hi - 1];
        let w = a[hi][hi - 1] * a[hi - 1][hi];
        if l == hi - 1 {
            let p = 0.5 * (y - x);
            let q = p * p + w;
            let z = q.abs().sqrt();
            let x = x + shift_acc;
            if q >= 0.0 {
                let z = p + z.copysign(p);
                eig[hi - 1] = Complex64::new(x + z, 0.0);
                eig[hi] = if z != 0.0 {
                    Complex64::new(x - w / z, 0.0)
                } else {
                    Complex64::new(x + z, 0.0)
                };
            } else {
                eig[hi - 1] = Complex64::new(x + p, z);
                eig[hi] = Complex64::new(x + p, -z);
            }
            nn -= 2;
            its = 0;
            continue;
        }
        if its == MAX_SWEEPS_PER_EIGENVALUE {
            return Err(Error::EigenNonConvergence { index: hi });
        }
        let (mut x, mut y, mut w) = (x, y, w);
        if its == 10 || its == 20 {
            // Exceptional shift.
            shift_acc += x;
            for (i, row) in a.iter_mut().enumerate().take(hi + 1) {
                row[i] -= x;
            }
            let s = a[hi][hi - 1].abs() + a[hi - 1][hi - 2].abs();
            x = 0.75 * s;
            y = x;
            w = -0.4375 * s * s;
        }
        its += 1;
        // Look for two consecutive small subdiagonal elements.
        let mut m = hi - 2;
        let (mut p, mut q, mut r);
        loop {
            let z = a[m][m];
            let rr = x - z;
            let ss = y - z;
            p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
            q = a[m + 1][m + 1] - z - rr - ss;
            r = a[m + 2][m + 1];
            let s = p.abs() + q.abs() + r.abs();
            p /= s;
            q /= s;
            r /= s;
            if m == l {
                break;
            }
            let u = a[m][m - 1].abs() * (q.abs() + r.abs());
            let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
            if u <= f64::EPSILON * v {
                break;
            }
            m -= 1;
        }
        for i in m..hi - 1 {
            a[i + 2][i] = 0.0;
            if i != m {
                a[i + 2][i - 1] = 0.0;
            }
        }
        // Double-shift QR step on rows/columns l..=hi.
        let mut k = m;
        while k < hi {
            let mut xk = 0.0;
            if k != m {
                p = a[k][k - 1];
                q = a[k + 1][k - 1];
                r = if k + 1 != hi { a[k + 2][k - 1] } else { 0.0 };
                xk = p.abs() + q.abs() + r.abs();
                if xk != 0.0 {
                    p /= xk;
                    q /= xk;
                    r /= xk;
                }
            }
            let s = (p * p + q * q + r * r).sqrt().copysign(p);
            if s != 0.0 {
                if k == m {
                    if l != m {
                        a[k][k - 1] = -a[k][k - 1];
                    }
                } else {
                    a[k][k - 1] = -s * xk;
                }
                p += s;
                let xx = p / s;
                let yy = q / s;
                let zz = r / s;
                q /= p;
                r /= p;
                for j in k..=hi {
                    let mut pp = a[k][j] + q * a[k + 1][j];
                    if k + 1 != hi {
                        pp += r * a[k + 2][j];
                        a[k + 2][j] -= pp * zz;
                    }
                    a[k + 1][j] -= pp * yy;
                    a[k][j] -= pp * xx;
                }
                let mmin = if hi < k + 3 { hi } else { k + 3 };
                for row in a.iter_mut().take(mmin + 1).skip(l) {
                    let mut pp = xx * row[k] + yy * row[k + 1];
                    if k + 1 != hi {
                        pp += zz * row[k + 2];
                        row[k + 2] -= pp * r;
                    }
                    row[k + 1] -= pp * q;
                    row[k] -= pp;
                }
            }
            k += 1;
        }
    }
    Ok(eig)
}

/// Single-shift QR with Wilkinson shifts on a row-major complex Hessenberg matrix.
fn complex_hessenberg_qr(a: &mut [Vec<Complex64>]) -> Result<Vec<Complex64>> {
    let n = a.len();
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].norm();
        }
    }
    let mut hi = n;
    let mut its = 0usize;
    while hi > 0 {
        let top = hi - 1;
        let mut l = top;
        while l > 0 {
            let mut s = a[l - 1][l - 1].norm() + a[l][l].norm();
            if s == 0.0 {
                s = anorm;
            }
            if a[l][l - 1].norm() <= DEFLATION_EPS * s {
                a[l][l - 1] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == top {
            eig[top] = a[top][top];
            hi -= 1;
            its = 0;
            continue;
        }
        if its == MAX_SWEEPS_PER_EIGENVALUE {
            return Err(Error::EigenNonConvergence { index: top });
        }
        let mu = if its == 10 || its == 20 {
            let s = a[top][top - 1].re.abs()
                + if top >= 2 { a[top - 1][top - 2].re.abs() } else { 0.0 };
            a[top][top] + Complex64::new(s, 0.0)
        } else {
            wilkinson_shift(
                a[top - 1][top - 1],
                a[top - 1][top],
                a[top][top - 1],
                a[top][top],
            )
        };
        its += 1;
        for (i, row) in a.iter_mut().enumerate().take(top + 1).skip(l) {
            row[i] -= mu;
        }
        let mut rotations = Vec::with_capacity(top - l);
        for k in l..top {
            let (c, s) = givens(a[k][k], a[k + 1][k]);
            for j in k..=top {
                let t1 = a[k][j];
                let t2 = a[k + 1][j];
                a[k][j] = t1.scale(c) + s * t2;
                a[k + 1][j] = -s.conj() * t1 + t2.scale(c);
            }
            rotations.push((c, s));
        }
        for (offset, &(c, s)) in rotations.iter().enumerate() {
            let k = l + offset;
            for row in a.iter_mut().take((k + 2).min(top) + 1).skip(l) {
                let t1 = row[k];
                let t2 = row[k + 1];
                row[k] = t1.scale(c) + t2 * s.conj();
                row[k + 1] = -t1 * s + t2.scale(c);
            }
        }
        for (i, row) in a.iter_mut().enumerate().take(top + 1).skip(l) {
            row[i] += mu;
        }
    }
    Ok(eig)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Givens rotation `[c s; -s̄ c]` that zeroes `b` in `(a, b)`.
pub(crate) fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, (b / bn).conj());
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// Eigenvalues and unit-norm eigenvectors of a general square matrix.
///
/// Vectors come from inverse iteration against the original matrix; within a
/// cluster of equal eigenvalues successive vectors are orthogonalized so that
/// a non-defective multiple eigenvalue still yields an independent set.
pub fn eig<S: Scalar>(a: &DenseMatrix<S>) -> Result<(Vec<Complex64>, DenseMatrix<Complex64>)> {
    let values = eigenvalues(a)?;
    let n = a.n_rows();
    let ac = a.to_complex();
    let anorm = ac.norm_frobenius().max(f64::MIN_POSITIVE);
    let cluster_tol = 1e-8 * anorm;
    let mut vectors = DenseMatrix::<Complex64>::zeros(n, n);
    for (idx, &lambda) in values.iter().enumerate() {
        let siblings: Vec<usize> = (0..idx)
            .filter(|&j| (values[j] - lambda).norm() <= cluster_tol)
            .collect();
        let shift = lambda + Complex64::new(anorm * 1e-13, anorm * 1e-13);
        let mut m = ac.clone();
        for i in 0..n {
            m[(i, i)] -= shift;
        }
        let lu = perturbed_lu(m, anorm);
        let mut x: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0 + 0.1 * ((i * 7 + idx * 3) % 11) as f64, 0.05 * i as f64))
            .collect();
        for _ in 0..4 {
            x = lu.solve(&x)?;
            for &j in &siblings {
                let v = vectors.col(j).to_vec();
                let proj = vector::dot(&v, &x);
                vector::axpy(-proj, &v, &mut x);
            }
            let nx = vector::norm(&x);
            if nx == 0.0 || !nx.is_finite() {
                return Err(Error::Singular {
                    index: idx,
                    pivot: 0.0,
                });
            }
            vector::scale_real(1.0 / nx, &mut x);
        }
        vectors.col_mut(idx).copy_from_slice(&x);
    }
    Ok((values, vectors))
}

/// LU that replaces vanishing pivots by a tiny multiple of the norm, as
/// inverse iteration needs a solve with a (nearly) singular shifted matrix.
fn perturbed_lu(mut m: DenseMatrix<Complex64>, anorm: f64) -> crate::linalg::dense::Lu<Complex64> {
    loop {
        match m.lu() {
            Ok(lu) => return lu,
            Err(Error::Singular { .. }) => {
                for i in 0..m.n_rows() {
                    m[(i, i)] += Complex64::new(anorm * 1e-12, 0.0);
                }
            }
            Err(e) => unreachable!("square matrix: {e}"),
        }
    }
}
