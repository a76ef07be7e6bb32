mod common;

use common::*;
use num_complex::Complex64;
use polyinv::linalg::{
    eigenvalues, hermitian_eigen, least_squares_hessenberg, singular_values, spectral_norm, symmetric_eigen, vector,
    BandLu, DenseMatrix, SparseMatrix,
};
use polyinv::matrices::gen_convdiff_1d;
use polyinv::rng::Rng;
use proptest::prelude::*;

fn triplets_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (2usize..9).prop_flat_map(|n| {
        let entry = (0..n, 0..n, -5.0f64..5.0);
        (Just(n), proptest::collection::vec(entry, 0..3 * n))
    })
}

proptest! {
    #[test]
    fn spmv_matches_dense_sum_of_triplets((n, trips) in triplets_strategy(), seed in 0u64..1000) {
        let a = SparseMatrix::from_triplets(n, n, trips.clone()).unwrap();
        let mut rng = Rng::new(seed);
        let x = random_vec(&mut rng, n);
        let mut expect = vec![0.0; n];
        for &(i, j, v) in &trips {
            expect[i] += v * x[j];
        }
        let y = a.spmv(&x).unwrap();
        for (p, q) in y.iter().zip(&expect) {
            prop_assert!((p - q).abs() <= 1e-12 * (1.0 + q.abs()));
        }
    }

    #[test]
    fn adjoint_product_is_conjugate_transpose((n, trips) in triplets_strategy(), seed in 0u64..1000) {
        let ctrips: Vec<(usize, usize, Complex64)> =
            trips.iter().map(|&(i, j, v)| (i, j, c(v, 0.5 * v - 1.0))).collect();
        let a = SparseMatrix::from_triplets(n, n, ctrips.clone()).unwrap();
        let mut rng = Rng::new(seed);
        let x: Vec<Complex64> = (0..n).map(|_| rng.complex_normal()).collect();
        let mut expect = vec![c(0.0, 0.0); n];
        for &(i, j, v) in &ctrips {
            expect[j] += v.conj() * x[i];
        }
        let mut y = vec![c(0.0, 0.0); n];
        a.spmv_adjoint_into(&x, &mut y);
        for (p, q) in y.iter().zip(&expect) {
            prop_assert!((p - q).norm() <= 1e-12 * (1.0 + q.norm()));
        }
    }

    #[test]
    fn lu_solution_has_small_residual(n in 1usize..12, seed in 0u64..1000) {
        let mut rng = Rng::new(seed);
        let a = random_dense(&mut rng, n, 0.0);
        let b = random_vec(&mut rng, n);
        let x = a.lu().unwrap().solve(&b).unwrap();
        let reference = solve(&to_rows(&a), &real_vec(&b));
        let scale = vnorm(&reference).max(1.0);
        for (p, q) in x.iter().zip(&reference) {
            prop_assert!((c(*p, 0.0) - q).norm() <= 1e-8 * scale);
        }
    }

    #[test]
    fn eigenvalues_match_trace_and_determinant(n in 1usize..10, seed in 0u64..1000) {
        let mut rng = Rng::new(seed);
        let a = random_dense(&mut rng, n, 0.0);
        let ev = eigenvalues(&a).unwrap();
        prop_assert_eq!(ev.len(), n);
        let trace: f64 = (0..n).map(|i| a[(i, i)]).sum();
        let sum: Complex64 = ev.iter().sum();
        let prod: Complex64 = ev.iter().product();
        let d = det(&to_rows(&a));
        let scale = a.norm_frobenius();
        prop_assert!((sum - c(trace, 0.0)).norm() <= 1e-10 * scale * n as f64);
        prop_assert!((prod - d).norm() <= 1e-9 * scale.powi(n as i32).max(1.0));
    }

    #[test]
    fn singular_values_of_reflected_diagonal(n in 1usize..10, seed in 0u64..1000) {
        let mut rng = Rng::new(seed);
        let u = unit_random(&mut rng, n);
        let s: Vec<f64> = (0..n).map(|_| rng.uniform_in(0.1, 10.0)).collect();
        // Householder reflector H = I - 2 u uᵀ; H diag(s) H has singular values s.
        let h = DenseMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - 2.0 * u[i] * u[j]);
        let a = h.matmul(&DenseMatrix::from_diagonal(&s)).unwrap().matmul(&h).unwrap();
        let mut expect = s.clone();
        expect.sort_by(|p, q| q.partial_cmp(p).unwrap());
        let got = singular_values(&a).unwrap();
        for (p, q) in got.iter().zip(&expect) {
            prop_assert!((p - q).abs() <= 1e-12 * expect[0]);
        }
        prop_assert!((spectral_norm(&a).unwrap() - expect[0]).abs() <= 1e-12 * expect[0]);
    }

    #[test]
    fn symmetric_eigenpairs_satisfy_definition(n in 1usize..10, seed in 0u64..1000) {
        let mut rng = Rng::new(seed);
        let b = random_dense(&mut rng, n, 0.0);
        let a = DenseMatrix::from_fn(n, n, |i, j| b[(i, j)] + b[(j, i)]);
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        for (k, &lam) in vals.iter().enumerate() {
            let v = vecs.col(k);
            let av = a.matvec(v).unwrap();
            let res: f64 = av.iter().zip(v).map(|(p, q)| (p - lam * q).powi(2)).sum::<f64>().sqrt();
            prop_assert!(res <= 1e-10 * a.norm_frobenius());
            prop_assert!((vector::norm(v) - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn triangular_eigenvalues_are_the_diagonal() {
    let a = DenseMatrix::from_rows(&[
        vec![3.0, 1.0, -2.0, 4.0],
        vec![0.0, -1.0, 5.0, 2.0],
        vec![0.0, 0.0, 7.0, 1.0],
        vec![0.0, 0.0, 0.0, 0.5],
    ]);
    let mut ev: Vec<f64> = eigenvalues(&a).unwrap().iter().map(|z| z.re).collect();
    ev.sort_by(|p, q| p.partial_cmp(q).unwrap());
    assert_eq!(ev.len(), 4);
    for (p, q) in ev.iter().zip([-1.0, 0.5, 3.0, 7.0]) {
        assert!((p - q).abs() < 1e-12, "{p} vs {q}");
    }
}

#[test]
fn rotation_has_conjugate_eigenvalues() {
    let a = DenseMatrix::from_rows(&[vec![0.0, -2.0], vec![2.0, 0.0]]);
    let ev = eigenvalues(&a).unwrap();
    assert_eq!(ev.len(), 2);
    assert_eq!(ev[0], ev[1].conj());
    assert!((ev[0].im.abs() - 2.0).abs() < 1e-14 && ev[0].re.abs() < 1e-14);
}

#[test]
fn hermitian_eigenvalues_of_pauli_y() {
    let a = DenseMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]);
    let (vals, _) = hermitian_eigen(&a).unwrap();
    assert_eq!(vals.len(), 2);
    assert!((vals[0] + 1.0).abs() < 1e-13 && (vals[1] - 1.0).abs() < 1e-13);
}

#[test]
fn banded_lu_matches_dense_reference() {
    let a = gen_convdiff_1d(40, 30.0, 3.0).unwrap();
    let mut rng = Rng::new(7);
    let b = random_vec(&mut rng, 40);
    let x = BandLu::factor(&a).unwrap().solve(&b).unwrap();
    let reference = solve(&sparse_rows(&a), &real_vec(&b));
    for (p, q) in x.iter().zip(&reference) {
        assert!((c(*p, 0.0) - q).norm() < 1e-10 * vnorm(&reference));
    }
}

#[test]
fn hessenberg_least_squares_matches_normal_equations() {
    let mut rng = Rng::new(3);
    let k = 5;
    let h = DenseMatrix::from_fn(k + 1, k, |i, j| if i <= j + 1 { rng.normal() } else { 0.0 });
    let beta = 2.5;
    let (y, res) = least_squares_hessenberg(&h, beta).unwrap();
    let hr = to_rows(&h);
    let ht = adjoint(&hr);
    let mut rhs = vec![c(0.0, 0.0); k + 1];
    rhs[0] = c(beta, 0.0);
    let reference = solve(&matmul(&ht, &hr), &matvec(&ht, &rhs));
    for (p, q) in y.iter().zip(&reference) {
        assert!((c(*p, 0.0) - q).norm() < 1e-9);
    }
    let r: Vec<Complex64> = matvec(&hr, &reference).iter().zip(&rhs).map(|(p, q)| q - p).collect();
    assert!((res - vnorm(&r)).abs() < 1e-10);
}
