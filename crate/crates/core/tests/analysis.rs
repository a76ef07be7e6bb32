mod common;

use common::*;
use num_complex::Complex64;
use polyinv::analysis::{
    check_hritz_svd_bound, check_second_rhs_bound, check_thm_general, check_thm_normal, interlacing_check,
    numerical_range_boundary, random_diagonalizable, rel_inverse_error, rel_inverse_error_with, run_suite,
    InverseErrorMethod, SUITES,
};
use polyinv::krylov::{arnoldi, harmonic_ritz};
use polyinv::linalg::{DenseMatrix, SparseMatrix};
use polyinv::matrices::gen_circulant_shift;
use polyinv::poly::{apply_p, eval_scalar, leja_order, RootPolynomial};
use polyinv::rng::Rng;
use proptest::prelude::*;

fn random_poly(rng: &mut Rng, degree: usize) -> RootPolynomial {
    let roots: Vec<Complex64> = (0..degree).map(|_| c(rng.uniform_in(1.0, 8.0), 0.0)).collect();
    leja_order(&roots, true).unwrap()
}

/// `‖A⁻¹ - p(A)‖ / ‖A⁻¹‖` from dense products.
fn brute_force_inverse_error(a: &DenseMatrix<f64>, p: &RootPolynomial) -> f64 {
    let ar = to_rows(a);
    let n = a.n_rows();
    let mut pi = identity(n);
    for t in p.roots() {
        pi = matmul(&add_scaled(&identity(n), -1.0 / t, &ar), &pi);
    }
    let phi = add_scaled(&identity(n), c(-1.0, 0.0), &pi);
    let inv = inverse(&ar);
    let pa = matmul(&inv, &phi);
    let diff = add_scaled(&inv, c(-1.0, 0.0), &pa);
    spectral_norm(&diff) / spectral_norm(&inv)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn inverse_error_matches_dense_computation(seed in 0u64..1000, degree in 1usize..5) {
        let mut rng = Rng::new(seed);
        let dense = random_dense(&mut rng, 8, 6.0);
        let a = SparseMatrix::from_dense(&dense);
        let p = random_poly(&mut rng, degree);
        let got = rel_inverse_error_with(&a, &|v: &[f64]| apply_p(&p, &a, v), InverseErrorMethod::Dense).unwrap();
        let expect = brute_force_inverse_error(&dense, &p);
        prop_assert!(!got.estimated);
        prop_assert!((got.relative - expect).abs() <= 1e-10 * expect.max(1e-300), "{} vs {}", got.relative, expect);
    }

    #[test]
    fn randomized_estimate_is_a_lower_bound(seed in 0u64..1000) {
        let mut rng = Rng::new(seed);
        let dense = random_dense(&mut rng, 8, 6.0);
        let a = SparseMatrix::from_dense(&dense);
        let p = random_poly(&mut rng, 3);
        let apply = |v: &[f64]| apply_p(&p, &a, v);
        let exact = rel_inverse_error_with(&a, &apply, InverseErrorMethod::Dense).unwrap();
        let est = rel_inverse_error_with(&a, &apply, InverseErrorMethod::Randomized { steps: 30, seed }).unwrap();
        prop_assert!(est.estimated);
        prop_assert!(est.error_norm <= exact.error_norm * (1.0 + 1e-10));
        prop_assert!(est.inverse_norm <= exact.inverse_norm * (1.0 + 1e-10));
    }

    #[test]
    fn thm_general_chain_holds(seed in 0u64..1000) {
        let mut rng = Rng::new(seed);
        let a = random_dense(&mut rng, 6, 5.0);
        let b = unit_random(&mut rng, 6);
        let p = random_poly(&mut rng, 3);
        let rep = check_thm_general(&a, &b, &|v: &[f64]| apply_p(&p, &a, v)).unwrap();
        prop_assert!(rep.holds, "{:?}", rep);
    }

    #[test]
    fn thm_normal_holds_for_random_diagonalizable(seed in 0u64..1000) {
        let mut rng = Rng::new(seed);
        let a = random_diagonalizable(&mut rng, 6).unwrap();
        let b = unit_random(&mut rng, 6);
        let p = random_poly(&mut rng, 3);
        let rep = check_thm_normal(&a, &b, &|v: &[f64]| apply_p(&p, &a, v)).unwrap();
        prop_assert!(rep.holds || rep.inconclusive, "{:?}", rep);
    }

    #[test]
    fn second_rhs_bound_holds(seed in 0u64..1000) {
        let mut rng = Rng::new(seed);
        let a = random_diagonalizable(&mut rng, 8).unwrap();
        let b1 = unit_random(&mut rng, 8);
        let b2 = unit_random(&mut rng, 8);
        let p = random_poly(&mut rng, 4);
        let rep = check_second_rhs_bound(&a, &b1, &b2, &|v: &[f64]| apply_p(&p, &a, v)).unwrap();
        prop_assert!(rep.holds || rep.inconclusive, "{:?}", rep);
    }
}

#[test]
fn interpolating_polynomial_has_zero_inverse_error() {
    let d = [1.0, 2.0, 3.0, 5.0];
    let a = SparseMatrix::from_diagonal(&d);
    let p = leja_order(&d.map(|x| c(x, 0.0)), true).unwrap();
    let e = rel_inverse_error(&a, &|v: &[f64]| apply_p(&p, &a, v)).unwrap();
    assert!(e.relative <= 1e-12);
    let dense = a.to_dense();
    let b = [0.5, 0.5, 0.5, 0.5];
    let rep = check_thm_general(&dense, &b, &|v: &[f64]| apply_p(&p, &a, v)).unwrap();
    for key in ["lhs", "mid", "rhs"] {
        assert!(rep.value(key).unwrap() <= 1e-12, "{key}");
    }
}

#[test]
fn unitary_matrix_lower_bound_is_the_residual() {
    let a = gen_circulant_shift(6).unwrap().to_dense();
    let mut rng = Rng::new(1);
    let b = unit_random(&mut rng, 6);
    let p = random_poly(&mut rng, 2);
    let rep = check_thm_general(&a, &b, &|v: &[f64]| apply_p(&p, &a, v)).unwrap();
    assert!(rep.holds);
    assert!((rep.value("kappa_a").unwrap() - 1.0).abs() < 1e-12);
    assert!((rep.value("lhs").unwrap() - rep.value("residual").unwrap()).abs() <= 1e-12);
}

#[test]
fn deficient_rhs_is_inconclusive() {
    let a = DenseMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
    let s = (1.0f64 - 1e-28).sqrt() / 2f64.sqrt();
    let b = [s, s, 1e-14];
    let p = random_poly(&mut Rng::new(0), 2);
    let rep = check_thm_normal(&a, &b, &|v: &[f64]| apply_p(&p, &a, v)).unwrap();
    assert!(rep.inconclusive && !rep.holds);
}

#[test]
fn identical_rhs_give_ratio_one() {
    let a = DenseMatrix::from_diagonal(&[1.0, 2.0, 4.0]);
    let b = [0.6, 1e-3, (1.0f64 - 0.36 - 1e-6).sqrt()];
    let p = random_poly(&mut Rng::new(4), 2);
    let rep = check_second_rhs_bound(&a, &b, &b, &|v: &[f64]| apply_p(&p, &a, v)).unwrap();
    assert!(rep.holds);
    assert!((rep.value("max_beta_ratio").unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(rep.value("lhs"), rep.value("r1"));
}

#[test]
fn harmonic_ritz_bound_cases() {
    let a = gen_circulant_shift(8).unwrap();
    let mut rng = Rng::new(3);
    let b = random_vec(&mut rng, 8);
    let thetas = harmonic_ritz(&arnoldi(&a, &b, 5).unwrap()).unwrap();
    assert!(thetas.iter().all(|t| t.norm() >= 1.0 - 1e-12));
    assert!(check_hritz_svd_bound(&a.to_dense(), &thetas, 1e-12).unwrap().holds);

    let d = DenseMatrix::from_diagonal(&[1.0, 2.0]);
    let rep = check_hritz_svd_bound(&d, &[c(5.0 / 3.0, 0.0)], 1e-12).unwrap();
    assert!(rep.holds);
    assert!((rep.value("min_ratio").unwrap() - 5.0 / 3.0).abs() < 1e-14);

    for seed in 0..50 {
        let mut rng = Rng::new(seed);
        let a = random_dense(&mut rng, 8, 0.0);
        let b = random_vec(&mut rng, 8);
        let thetas = harmonic_ritz(&arnoldi(&a, &b, 4).unwrap()).unwrap();
        assert!(check_hritz_svd_bound(&a, &thetas, 1e-12).unwrap().holds, "seed {seed}");
    }
}

#[test]
fn full_space_harmonic_ritz_values_are_eigenvalues() {
    let d = [-3.0, -1.0, 2.0, 4.0, 6.0];
    let a = SparseMatrix::from_diagonal(&d);
    let thetas = harmonic_ritz(&arnoldi(&a, &[1.0, 0.8, 0.6, 0.4, 0.2], 5).unwrap()).unwrap();
    let mut re: Vec<f64> = thetas.iter().map(|t| t.re).collect();
    re.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for (x, y) in re.iter().zip(d) {
        assert!((x - y).abs() < 1e-10);
    }
    assert!(interlacing_check(&a, &thetas).unwrap().holds);
}

#[test]
fn numerical_range_of_normal_and_jordan_matrices() {
    let seg = numerical_range_boundary(&DenseMatrix::from_diagonal(&[0.0, 1.0]), 90).unwrap();
    assert!(seg.iter().all(|z| z.im.abs() < 1e-12 && z.re > -1e-12 && z.re < 1.0 + 1e-12));

    let heptagon = numerical_range_boundary(&gen_circulant_shift(7).unwrap().to_dense(), 360).unwrap();
    let verts: Vec<Complex64> = (0..7).map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 7.0)).collect();
    let inner_radius = (std::f64::consts::PI / 7.0).cos();
    for z in &heptagon {
        let on_edge = (0..7).any(|k| {
            let (p, q) = (verts[k], verts[(k + 1) % 7]);
            let t = ((z - p) * (q - p).conj()).re / (q - p).norm_sqr();
            t > -1e-9 && t < 1.0 + 1e-9 && (p + (q - p) * t - z).norm() < 1e-9
        });
        assert!(on_edge, "{z} is not on the heptagon");
        assert!(z.norm() >= inner_radius - 1e-9);
    }
    for v in &verts {
        assert!(heptagon.iter().any(|z| (z - v).norm() < 1e-9), "vertex {v} missing");
    }

    let jordan = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
    let circle = numerical_range_boundary(&jordan, 360).unwrap();
    let dev = circle.iter().map(|z| (z.norm() - 0.5).abs()).fold(0.0, f64::max);
    assert!(dev <= 1e-8, "deviation {dev}");
}

#[test]
fn scalar_polynomial_on_diagonal_matches_operator() {
    let d = [0.5, 1.5, 2.5];
    let a = SparseMatrix::from_diagonal(&d);
    let p = random_poly(&mut Rng::new(12), 3);
    let y = apply_p(&p, &a, &[1.0, 1.0, 1.0]).unwrap();
    for (yi, di) in y.iter().zip(d) {
        assert!((c(*yi, 0.0) - eval_scalar(&p, c(di, 0.0)).1).norm() < 1e-12);
    }
}

#[test]
fn every_suite_holds_on_a_short_sweep() {
    for suite in SUITES {
        let reports = run_suite(suite, 10, 1).unwrap();
        assert!(!reports.is_empty());
        let bad: Vec<_> = reports.iter().filter(|r| !r.holds).collect();
        assert!(bad.is_empty(), "{suite}: {bad:?}");
    }
}
