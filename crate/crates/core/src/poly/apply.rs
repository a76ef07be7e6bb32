use num_complex::Complex64;

use super::{Block, RootPolynomial};
use crate::error::{check_dim, Error, Result};
use crate::linalg::operator::LinearOperator;
use crate::linalg::vector;
use crate::scalar::Scalar;

/// Coefficients of the quadratic factor `1 - a z + b z²` of a conjugate pair.
fn pair_coefficients(theta: Complex64) -> (f64, f64) {
    let m2 = theta.norm_sqr();
    (2.0 * theta.re / m2, 1.0 / m2)
}

fn check<S: Scalar>(p: &RootPolynomial, dim: usize, v: &[S]) -> Result<()> {
    check_dim(dim, v.len())?;
    if !S::IS_COMPLEX && !p.is_real() && p.roots().iter().any(|z| z.im != 0.0) {
        return Err(Error::InvalidArgument(
            "complex roots without conjugate pairing cannot act on real vectors".into(),
        ));
    }
    Ok(())
}

/// `π(A) v`, using `degree(π)` products with `A`.
pub fn apply_pi<S: Scalar, A: LinearOperator<S> + ?Sized>(
    p: &RootPolynomial,
    a: &A,
    v: &[S],
) -> Result<Vec<S>> {
    check(p, a.dim(), v)?;
    let n = v.len();
    let mut w = v.to_vec();
    let mut t = vec![S::zero(); n];
    let mut u = vec![S::zero(); n];
    for block in p.blocks() {
        match block {
            Block::Single(i) => {
                let inv = S::from_complex(1.0 / p.roots()[i]);
                a.apply(&w, &mut t);
                vector::axpy(-inv, &t, &mut w);
            }
            Block::Pair(i) => {
                let (ca, cb) = pair_coefficients(p.roots()[i]);
                a.apply(&w, &mut t);
                a.apply(&t, &mut u);
                for k in 0..n {
                    w[k] += u[k].scale(cb) - t[k].scale(ca);
                }
            }
        }
    }
    Ok(w)
}

/// `p(A) v` where `π(z) = 1 - z p(z)`.
///
/// The partial products `w = ∏_{earlier}(I - A/θ) v` are accumulated as
/// `acc += w/θ`, which telescopes to `z p(z) = 1 - π(z)`. The last block's
/// update of `w` is never needed, so the cost is `degree(π) - 1` products.
pub fn apply_p<S: Scalar, A: LinearOperator<S> + ?Sized>(
    p: &RootPolynomial,
    a: &A,
    v: &[S],
) -> Result<Vec<S>> {
    check(p, a.dim(), v)?;
    let n = v.len();
    let mut w = v.to_vec();
    let mut acc = vec![S::zero(); n];
    let mut t = vec![S::zero(); n];
    let mut u = vec![S::zero(); n];
    let blocks = p.blocks();
    let last = blocks.len().saturating_sub(1);
    for (b, block) in blocks.into_iter().enumerate() {
        match block {
            Block::Single(i) => {
                let inv = S::from_complex(1.0 / p.roots()[i]);
                vector::axpy(inv, &w, &mut acc);
                if b != last {
                    a.apply(&w, &mut t);
                    vector::axpy(-inv, &t, &mut w);
                }
            }
            Block::Pair(i) => {
                let (ca, cb) = pair_coefficients(p.roots()[i]);
                a.apply(&w, &mut t);
                for k in 0..n {
                    acc[k] += w[k].scale(ca) - t[k].scale(cb);
                }
                if b != last {
                    a.apply(&t, &mut u);
                    for k in 0..n {
                        w[k] += u[k].scale(cb) - t[k].scale(ca);
                    }
                }
            }
        }
    }
    Ok(acc)
}

/// `φ(A) v = v - π(A) v`.
pub fn apply_phi<S: Scalar, A: LinearOperator<S> + ?Sized>(
    p: &RootPolynomial,
    a: &A,
    v: &[S],
) -> Result<Vec<S>> {
    let pi = apply_pi(p, a, v)?;
    Ok(vector::sub(v, &pi))
}

/// `(π(z), p(z), φ(z))` by the same recurrences as the operator versions.
pub fn eval_scalar(p: &RootPolynomial, z: Complex64) -> (Complex64, Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let mut w = one;
    let mut acc = Complex64::new(0.0, 0.0);
    for block in p.blocks() {
        match block {
            Block::Single(i) => {
                let inv = 1.0 / p.roots()[i];
                acc += w * inv;
                w -= z * w * inv;
            }
            Block::Pair(i) => {
                let (ca, cb) = pair_coefficients(p.roots()[i]);
                let t = z * w;
                acc += w * ca - t * cb;
                w += z * t * cb - t * ca;
            }
        }
    }
    (w, acc, one - w)
}

/// The operator `φ(A)`, one application costing `degree(φ)` products with `A`.
pub struct PhiOperator<'a, S: Scalar, A: LinearOperator<S> + ?Sized> {
    poly: &'a RootPolynomial,
    a: &'a A,
    _marker: std::marker::PhantomData<S>,
}

impl<'a, S: Scalar, A: LinearOperator<S> + ?Sized> PhiOperator<'a, S, A> {
    pub fn new(poly: &'a RootPolynomial, a: &'a A) -> Result<Self> {
        check(poly, a.dim(), &vec![S::zero(); a.dim()])?;
        Ok(PhiOperator {
            poly,
            a,
            _marker: std::marker::PhantomData,
        })
    }
}

impl<S: Scalar, A: LinearOperator<S> + ?Sized> LinearOperator<S> for PhiOperator<'_, S, A> {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn apply(&self, x: &[S], y: &mut [S]) {
        let phi = apply_phi(self.poly, self.a, x).expect("validated at construction");
        y.copy_from_slice(&phi);
    }

    fn cost(&self) -> usize {
        self.poly.degree() * self.a.cost()
    }
}
