use num_complex::Complex64;

use super::arnoldi::KrylovDecomposition;
use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::eigen::{eig, eigenvalues, hessenberg_eigenvalues};
use crate::linalg::operator::LinearOperator;
use crate::linalg::vector;
use crate::scalar::Scalar;

/// Generalized eigenvalues `μ = 1/θ` below this fraction of the largest are
/// treated as infinite harmonic Ritz values and dropped.
const INFINITE_ROOT_TOL: f64 = 1e-14;

/// Harmonic Ritz values: the roots of the GMRES residual polynomial.
///
/// When `H_{k,k}` is invertible these are the eigenvalues of the Hessenberg
/// matrix `H_{k,k} + |h_{k+1,k}|² f e_kᴴ` with `H_{k,k}ᴴ f = e_k`. Otherwise
/// the generalized problem `H_{k+1,k}ᴴ H_{k+1,k} c = θ H_{k,k}ᴴ c` is solved
/// for `μ = 1/θ` and infinite values are dropped, so fewer than `k` roots may
/// be returned.
pub fn harmonic_ritz<S: Scalar>(k: &KrylovDecomposition<S>) -> Result<Vec<Complex64>> {
    let steps = k.steps();
    if steps == 0 {
        return Err(Error::InvalidArgument("empty Krylov decomposition".into()));
    }
    let mut hk = k.h_square();
    let sub = k.h[(steps, steps - 1)];
    if sub == S::zero() {
        return hessenberg_eigenvalues(&hk);
    }
    let mut e = vec![S::zero(); steps];
    e[steps - 1] = S::one();
    let f = hk.adjoint().lu().and_then(|lu| lu.solve(&e));
    match f {
        Ok(f) => {
            let weight = sub.abs_sqr();
            for i in 0..steps {
                hk[(i, steps - 1)] += f[i].scale(weight);
            }
            hessenberg_eigenvalues(&hk)
        }
        Err(Error::Singular { .. }) => generalized_harmonic_ritz(k),
        Err(e) => Err(e),
    }
}

fn generalized_harmonic_ritz<S: Scalar>(k: &KrylovDecomposition<S>) -> Result<Vec<Complex64>> {
    let h = &k.h;
    let gram = h.adjoint().matmul(h)?;
    let hk_adj = k.h_square().adjoint();
    let lu = gram.lu()?;
    let steps = k.steps();
    let mut m = DenseMatrix::zeros(steps, steps);
    for j in 0..steps {
        let col = lu.solve(hk_adj.col(j))?;
        m.col_mut(j).copy_from_slice(&col);
    }
    let mu = eigenvalues(&m)?;
    let scale = mu.iter().fold(0.0f64, |s, z| s.max(z.norm()));
    Ok(mu
        .into_iter()
        .filter(|z| z.norm() > INFINITE_ROOT_TOL * scale)
        .map(|z| 1.0 / z)
        .collect())
}

/// Ritz values: the eigenvalues of `H_{k,k}`.
pub fn ritz<S: Scalar>(k: &KrylovDecomposition<S>) -> Result<Vec<Complex64>> {
    hessenberg_eigenvalues(&k.h_square())
}

/// Approximate eigenpairs from a Rayleigh–Ritz projection onto `span(V)`.
#[derive(Debug, Clone)]
pub struct RitzPairs {
    pub values: Vec<Complex64>,
    /// Unit-norm Ritz vectors `V y`.
    pub vectors: Vec<Vec<Complex64>>,
    /// Explicit `‖A x - θ x‖` for each pair.
    pub residual_norms: Vec<f64>,
}

/// Rayleigh–Ritz with `G = Vᴴ (A V)` formed by explicit products with `A`.
/// Returns the `nev` pairs of smallest magnitude, ascending. For real
/// operators a selected complex value brings its conjugate partner along,
/// so up to `nev + 1` pairs may be returned.
pub fn rayleigh_ritz_eigs<S: Scalar, A: LinearOperator<S> + ?Sized>(
    a: &A,
    v: &[Vec<S>],
    nev: usize,
) -> Result<RitzPairs> {
    let m = v.len();
    if nev > m {
        return Err(Error::InvalidArgument(format!(
            "requested {nev} eigenpairs from a {m}-dimensional subspace"
        )));
    }
    let av: Vec<Vec<S>> = v.iter().map(|col| a.apply_vec(col)).collect();
    let g = DenseMatrix::from_fn(m, m, |i, j| vector::dot(&v[i], &av[j]));
    let (values, vectors) = eig(&g)?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| {
        values[i]
            .norm()
            .partial_cmp(&values[j].norm())
            .expect("finite eigenvalues")
            .then(i.cmp(&j))
    });
    let mut chosen: Vec<usize> = Vec::new();
    for &i in &order {
        if chosen.len() >= nev {
            break;
        }
        if chosen.contains(&i) {
            continue;
        }
        chosen.push(i);
        if !S::IS_COMPLEX && values[i].im != 0.0 {
            if let Some(&p) = order
                .iter()
                .find(|&&p| p != i && !chosen.contains(&p) && values[p] == values[i].conj())
            {
                chosen.push(p);
            }
        }
    }
    let n = v.first().map_or(0, Vec::len);
    let mut out = RitzPairs {
        values: Vec::new(),
        vectors: Vec::new(),
        residual_norms: Vec::new(),
    };
    for i in chosen {
        let y = vectors.col(i);
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        let mut ax = vec![Complex64::new(0.0, 0.0); n];
        for (j, &yj) in y.iter().enumerate() {
            for r in 0..n {
                x[r] += v[j][r].to_complex() * yj;
                ax[r] += av[j][r].to_complex() * yj;
            }
        }
        let nx = vector::norm(&x);
        let theta = values[i];
        let res: f64 = ax
            .iter()
            .zip(&x)
            .map(|(p, q)| (p - theta * q).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / nx;
        vector::scale_real(1.0 / nx, &mut x);
        out.values.push(theta);
        out.vectors.push(x);
        out.residual_norms.push(res);
    }
    Ok(out)
}
