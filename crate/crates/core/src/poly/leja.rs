use num_complex::Complex64;

use super::{is_conj_pair, RootPolynomial};
use crate::error::{Error, Result};

/// Modified Leja order of `keys`, computed with sums of logarithms.
///
/// The first point has the largest modulus; each next point maximizes the
/// sum of `log|key - chosen|`. Whenever a point with a partner is chosen, the
/// partner follows immediately. Ties go to the smallest index.
pub fn leja_permutation(keys: &[Complex64], partner: &[Option<usize>]) -> Vec<usize> {
    let n = keys.len();
    assert_eq!(partner.len(), n);
    let mut order = Vec::with_capacity(n);
    let mut taken = vec![false; n];
    let mut score = vec![0.0f64; n];
    let choose = |i: usize, order: &mut Vec<usize>, taken: &mut Vec<bool>, score: &mut Vec<f64>| {
        order.push(i);
        taken[i] = true;
        for j in 0..n {
            if !taken[j] {
                score[j] += (keys[j] - keys[i]).norm().ln();
            }
        }
    };
    while order.len() < n {
        let mut best: Option<usize> = None;
        for j in 0..n {
            if taken[j] {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) if order.is_empty() => keys[j].norm() > keys[b].norm(),
                Some(b) => score[j] > score[b],
            };
            if better {
                best = Some(j);
            }
        }
        let i = best.expect("an untaken point remains");
        choose(i, &mut order, &mut taken, &mut score);
        if let Some(p) = partner[i] {
            if !taken[p] {
                choose(p, &mut order, &mut taken, &mut score);
            }
        }
    }
    order
}

/// Conjugate partners for a real-coefficient root list; every non-real root
/// must have one.
pub(crate) fn conjugate_partners(roots: &[Complex64]) -> Result<Vec<Option<usize>>> {
    let n = roots.len();
    let mut partner = vec![None; n];
    for i in 0..n {
        if roots[i].im == 0.0 || partner[i].is_some() {
            continue;
        }
        let found = (0..n).find(|&j| j != i && partner[j].is_none() && is_conj_pair(roots[i], roots[j]));
        match found {
            Some(j) => {
                partner[i] = Some(j);
                partner[j] = Some(i);
            }
            None => return Err(Error::UnpairedRoot { index: i }),
        }
    }
    Ok(partner)
}

/// Builds a polynomial from roots in arbitrary order, arranged in modified
/// Leja order. With `real = true` conjugate pairs are kept adjacent.
pub fn leja_order(roots: &[Complex64], real: bool) -> Result<RootPolynomial> {
    if roots.is_empty() {
        return Err(Error::InvalidArgument("no roots to order".into()));
    }
    if let Some(i) = roots.iter().position(|z| *z == Complex64::new(0.0, 0.0)) {
        return Err(Error::ZeroRoot { index: i });
    }
    let partner = if real {
        conjugate_partners(roots)?
    } else {
        vec![None; roots.len()]
    };
    let perm = leja_permutation(roots, &partner);
    RootPolynomial::new(perm.iter().map(|&i| roots[i]).collect(), real)
}
