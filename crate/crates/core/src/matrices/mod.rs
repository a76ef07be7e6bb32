//! Test operators and right-hand sides.
//!
//! The PDE generators are h²-scaled: the 2-D operator has diagonal
//! `4 - γ²h²` and unit neighbour couplings perturbed by the convection terms,
//! so entries stay of order one whatever the grid size.

mod mtx;

pub use mtx::{
    read_matrix_market, read_matrix_market_columns, write_matrix_market, write_matrix_market_columns, MatrixMarketData,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::sparse::SparseMatrix;
use crate::linalg::vector;
use crate::rng::Rng;
use crate::scalar::Scalar;

/// Five-point discretization of `-u_xx - u_yy + α u_x + β u_y - γ² u` on the
/// unit square with `grid_n` interior points per direction, ordered row by
/// row (x fastest).
pub fn gen_convdiff_2d(grid_n: usize, alpha: f64, beta: f64, gamma: f64) -> Result<SparseMatrix<f64>> {
    if grid_n < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid_n must be at least 2, got {grid_n}"
        )));
    }
    let h = 1.0 / (grid_n as f64 + 1.0);
    let n = grid_n * grid_n;
    let diag = 4.0 - gamma * gamma * h * h;
    let east = -1.0 + alpha * h / 2.0;
    let west = -1.0 - alpha * h / 2.0;
    let north = -1.0 + beta * h / 2.0;
    let south = -1.0 - beta * h / 2.0;
    let mut triplets = Vec::with_capacity(5 * n);
    for iy in 0..grid_n {
        for ix in 0..grid_n {
            let row = iy * grid_n + ix;
            if iy > 0 {
                triplets.push((row, row - grid_n, south));
            }
            if ix > 0 {
                triplets.push((row, row - 1, west));
            }
            triplets.push((row, row, diag));
            if ix + 1 < grid_n {
                triplets.push((row, row + 1, east));
            }
            if iy + 1 < grid_n {
                triplets.push((row, row + grid_n, north));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, triplets)
}

/// Three-point discretization of `-u'' + α u' - γ² u` on `n` interior points.
pub fn gen_convdiff_1d(n: usize, alpha: f64, gamma: f64) -> Result<SparseMatrix<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    let h = 1.0 / (n as f64 + 1.0);
    let diag = 2.0 - gamma * gamma * h * h;
    let upper = -1.0 + alpha * h / 2.0;
    let lower = -1.0 - alpha * h / 2.0;
    let mut triplets = Vec::with_capacity(3 * n);
    for i in 0..n {
        if i > 0 {
            triplets.push((i, i - 1, lower));
        }
        triplets.push((i, i, diag));
        if i + 1 < n {
            triplets.push((i, i + 1, upper));
        }
    }
    SparseMatrix::from_triplets(n, n, triplets)
}

fn tenths() -> impl Iterator<Item = f64> {
    (1..=9).map(|k| k as f64 / 10.0)
}

fn integers(lo: u32, hi: u32) -> impl Iterator<Item = f64> {
    (lo..=hi).map(f64::from)
}

/// Upper bidiagonal matrices of order 2500 with superdiagonal 0.2.
pub fn gen_bidiag_example11(case: u32) -> Result<SparseMatrix<f64>> {
    let diag: Vec<f64> = match case {
        1 => integers(1, 2500).collect(),
        2 => tenths().chain(integers(1, 2491)).collect(),
        3 => tenths().chain(integers(1, 2490)).chain([2600.0]).collect(),
        4 => tenths()
            .chain(integers(1, 2486))
            .chain([2600.0, 2700.0, 2800.0, 2900.0, 3000.0])
            .collect(),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "bidiagonal case must be 1..4, got {case}"
            )))
        }
    };
    assert_eq!(diag.len(), 2500);
    let n = diag.len();
    let triplets = diag
        .iter()
        .enumerate()
        .map(|(i, &d)| (i, i, d))
        .chain((0..n - 1).map(|i| (i, i + 1, 0.2)));
    SparseMatrix::from_triplets(n, n, triplets)
}

/// Diagonal spectrum with four gaps, order 2500.
pub fn gen_gap_diag() -> SparseMatrix<f64> {
    let diag: Vec<f64> = tenths()
        .chain(integers(1, 50))
        .chain(integers(551, 1000))
        .chain(integers(1501, 2000))
        .chain(integers(2501, 3000))
        .chain(integers(3501, 4491))
        .collect();
    assert_eq!(diag.len(), 2500, "gap spectrum must have 2500 entries");
    SparseMatrix::from_diagonal(&diag)
}

/// Diagonal of order 2501 whose spectrum is `k^p` mirrored about the middle,
/// scaled so that the middle of the spectrum stays near 1250.
pub fn gen_powerlaw_diag(p: f64) -> Result<SparseMatrix<f64>> {
    if !(p >= 0.0) {
        return Err(Error::InvalidArgument(format!("exponent must be >= 0, got {p}")));
    }
    let top = 1251f64.powf(p);
    let scale = 1250.5f64.powf(p - 1.0);
    let diag: Vec<f64> = (1..=1251)
        .map(|k| f64::from(k).powf(p))
        .chain((1..=1250).rev().map(|k| 2.0 * top - f64::from(k).powf(p)))
        .map(|v| v / scale)
        .collect();
    Ok(SparseMatrix::from_diagonal(&diag))
}

/// 50 equally spaced eigenvalues on [0.1, 1] and one outlier at 2.
pub fn gen_outlier_demo() -> SparseMatrix<f64> {
    let diag: Vec<f64> = (0..50)
        .map(|k| 0.1 + 0.9 * k as f64 / 49.0)
        .chain([2.0])
        .collect();
    SparseMatrix::from_diagonal(&diag)
}

/// Cyclic shift: ones on the superdiagonal and in the bottom-left corner.
pub fn gen_circulant_shift(n: usize) -> Result<SparseMatrix<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    SparseMatrix::from_triplets(n, n, (0..n).map(|i| (i, (i + 1) % n, 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsKind {
    /// Normally distributed entries scaled to unit 2-norm.
    NormalUnit,
    /// Entries drawn uniformly from {1, -1, i, -i}.
    FourPhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhsSpec {
    pub kind: RhsKind,
    pub seed: u64,
    pub count: usize,
}

/// Deterministic right-hand sides. Complex normal vectors draw real and
/// imaginary parts independently; four-phase vectors require complex scalars.
pub fn gen_rhs<S: Scalar>(n: usize, spec: &RhsSpec) -> Result<Vec<Vec<S>>> {
    if spec.count == 0 {
        return Err(Error::InvalidArgument("rhs count must be at least 1".into()));
    }
    if spec.kind == RhsKind::FourPhase && !S::IS_COMPLEX {
        return Err(Error::InvalidArgument(
            "four-phase right-hand sides need a complex matrix".into(),
        ));
    }
    let mut rng = Rng::new(spec.seed);
    let mut out = Vec::with_capacity(spec.count);
    for _ in 0..spec.count {
        let b: Vec<S> = match spec.kind {
            RhsKind::NormalUnit => {
                let mut b: Vec<S> = (0..n)
                    .map(|_| {
                        if S::IS_COMPLEX {
                            S::from_complex(rng.complex_normal())
                        } else {
                            S::from_f64(rng.normal())
                        }
                    })
                    .collect();
                let nb = vector::norm(&b);
                vector::scale_real(1.0 / nb, &mut b);
                b
            }
            RhsKind::FourPhase => (0..n)
                .map(|_| {
                    let z = match rng.below(4) {
                        0 => Complex64::new(1.0, 0.0),
                        1 => Complex64::new(-1.0, 0.0),
                        2 => Complex64::new(0.0, 1.0),
                        _ => Complex64::new(0.0, -1.0),
                    };
                    S::from_complex(z)
                })
                .collect(),
        };
        out.push(b);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convdiff_2d_small_poisson() {
        let a = gen_convdiff_2d(2, 0.0, 0.0, 0.0).unwrap();
        let d = a.to_dense();
        let expect = [
            [4.0, -1.0, -1.0, 0.0],
            [-1.0, 4.0, 0.0, -1.0],
            [-1.0, 0.0, 4.0, -1.0],
            [0.0, -1.0, -1.0, 4.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(d[(i, j)], expect[i][j]);
            }
        }
    }

    #[test]
    fn convdiff_2d_example_one_couplings() {
        let a = gen_convdiff_2d(49, 2.0, 0.0, 0.0).unwrap();
        assert_eq!(a.n_rows(), 2401);
        assert!((a.get(0, 1) - (-1.0 + 0.02)).abs() < 1e-15);
        assert!((a.get(1, 0) - (-1.0 - 0.02)).abs() < 1e-15);
        assert_eq!(a.get(0, 49), -1.0);
        assert_eq!(a.get(48, 49), 0.0);
        assert_eq!(gen_convdiff_2d(50, 2.0, 0.0, 0.0).unwrap().n_rows(), 2500);
    }

    #[test]
    fn convdiff_rejects_tiny_grid() {
        assert!(gen_convdiff_2d(1, 0.0, 0.0, 0.0).is_err());
        assert!(gen_convdiff_1d(1, 0.0, 0.0).is_err());
    }

    #[test]
    fn convdiff_1d_entries() {
        let a = gen_convdiff_1d(3, 0.0, 0.0).unwrap().to_dense();
        assert_eq!(a[(1, 1)], 2.0);
        assert_eq!(a[(0, 1)], -1.0);
        assert_eq!(a[(2, 1)], -1.0);
        let b = gen_convdiff_1d(1000, 5.0, 30.0).unwrap();
        let h = 1.0 / 1001.0;
        assert_eq!(b.get(0, 1), -1.0 + 5.0 * h / 2.0);
        assert_eq!(b.get(1, 0), -1.0 - 5.0 * h / 2.0);
    }

    #[test]
    fn bidiagonal_cases() {
        let one = gen_bidiag_example11(1).unwrap();
        assert_eq!(&one.diagonal()[..3], &[1.0, 2.0, 3.0]);
        let three = gen_bidiag_example11(3).unwrap();
        assert_eq!(three.diagonal()[2499], 2600.0);
        assert_eq!(three.diagonal()[2498], 2490.0);
        let four = gen_bidiag_example11(4).unwrap();
        assert_eq!(&four.diagonal()[2494..], &[2486.0, 2600.0, 2700.0, 2800.0, 2900.0, 3000.0]);
        for case in 1..=4 {
            let m = gen_bidiag_example11(case).unwrap();
            assert_eq!(m.n_rows(), 2500);
            assert_eq!(m.get(10, 11), 0.2);
        }
        assert!(gen_bidiag_example11(5).is_err());
    }

    #[test]
    fn gap_spectrum() {
        let d = gen_gap_diag().diagonal();
        assert_eq!(d.len(), 2500);
        let i50 = d.iter().position(|&v| v == 50.0).unwrap();
        assert_eq!(d[i50 + 1], 551.0);
        assert_eq!(*d.last().unwrap(), 4491.0);
    }

    #[test]
    fn powerlaw() {
        let d = gen_powerlaw_diag(1.0).unwrap().diagonal();
        assert_eq!(d.len(), 2501);
        assert!(d.iter().enumerate().all(|(i, &v)| v == (i + 1) as f64));
        let p = 2.5;
        let d = gen_powerlaw_diag(p).unwrap().diagonal();
        assert_eq!(d[0], 1.0 / 1250.5f64.powf(p - 1.0));
    }

    #[test]
    fn outlier_and_circulant() {
        let d = gen_outlier_demo().diagonal();
        assert_eq!(d.len(), 51);
        assert_eq!(d[0], 0.1);
        assert_eq!(d[50], 2.0);
        let c = gen_circulant_shift(2).unwrap().to_dense();
        assert_eq!((c[(0, 0)], c[(0, 1)], c[(1, 0)], c[(1, 1)]), (0.0, 1.0, 1.0, 0.0));
        let c7 = gen_circulant_shift(7).unwrap();
        assert_eq!(c7.norm_one(), 1.0);
        assert_eq!(c7.nnz(), 7);
    }

    #[test]
    fn rhs_generation() {
        let spec = RhsSpec {
            kind: RhsKind::NormalUnit,
            seed: 3,
            count: 2,
        };
        let b = gen_rhs::<f64>(50, &spec).unwrap();
        assert!((vector::norm(&b[0]) - 1.0).abs() <= 1e-15);
        assert_eq!(b, gen_rhs::<f64>(50, &spec).unwrap());
        let four = RhsSpec {
            kind: RhsKind::FourPhase,
            seed: 1,
            count: 1,
        };
        let z = gen_rhs::<Complex64>(4, &four).unwrap();
        assert!(z[0].iter().all(|v| v.norm() == 1.0));
        assert!(gen_rhs::<f64>(4, &four).is_err());
    }
}
