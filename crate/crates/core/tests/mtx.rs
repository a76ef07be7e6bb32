use num_complex::Complex64;
use polyinv::linalg::SparseMatrix;
use polyinv::matrices::{
    gen_convdiff_2d, read_matrix_market, read_matrix_market_columns, write_matrix_market, write_matrix_market_columns,
    MatrixMarketData,
};
use polyinv::rng::Rng;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn real_round_trip_is_exact(n in 1usize..12, seed in 0u64..1000) {
        let mut rng = Rng::new(seed);
        let trips: Vec<(usize, usize, f64)> = (0..3 * n).map(|_| (rng.below(n), rng.below(n), rng.normal() * 1e3)).collect();
        let a = SparseMatrix::from_triplets(n, n, trips).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.mtx");
        write_matrix_market(&path, &a).unwrap();
        prop_assert_eq!(read_matrix_market(&path).unwrap(), MatrixMarketData::Real(a));
    }

    #[test]
    fn complex_columns_round_trip(n in 1usize..10, k in 1usize..4, seed in 0u64..1000) {
        let mut rng = Rng::new(seed);
        let cols: Vec<Vec<Complex64>> = (0..k).map(|_| (0..n).map(|_| rng.complex_normal()).collect()).collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.mtx");
        write_matrix_market_columns(&path, &cols).unwrap();
        prop_assert_eq!(read_matrix_market_columns(&path).unwrap(), cols);
    }
}

#[test]
fn generated_matrix_round_trip() {
    let a = gen_convdiff_2d(6, 2.0, 1.0, 3.0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cd.mtx");
    write_matrix_market(&path, &a).unwrap();
    assert_eq!(read_matrix_market(&path).unwrap(), MatrixMarketData::Real(a));
}

#[test]
fn symmetric_storage_is_expanded() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.mtx");
    std::fs::write(
        &path,
        "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 4\n1 1 2.0\n2 1 -1.0\n3 2 -1.5\n3 3 4.0\n",
    )
    .unwrap();
    let MatrixMarketData::Real(a) = read_matrix_market(&path).unwrap() else {
        panic!("expected a real matrix");
    };
    assert_eq!(a.nnz(), 6);
    assert_eq!(a.get(0, 1), -1.0);
    assert_eq!(a.get(1, 0), -1.0);
    assert_eq!(a.get(1, 2), -1.5);
    assert_eq!(a.get(2, 1), -1.5);
    assert_eq!(a.get(1, 1), 0.0);
}

#[test]
fn hermitian_storage_is_conjugated() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.mtx");
    std::fs::write(&path, "%%MatrixMarket matrix coordinate complex hermitian\n2 2 2\n1 1 1.0 0.0\n2 1 0.5 2.0\n").unwrap();
    let MatrixMarketData::Complex(a) = read_matrix_market(&path).unwrap() else {
        panic!("expected a complex matrix");
    };
    assert_eq!(a.get(1, 0), Complex64::new(0.5, 2.0));
    assert_eq!(a.get(0, 1), Complex64::new(0.5, -2.0));
}

#[test]
fn real_columns_read_back_as_complex_with_zero_imaginary_part() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.mtx");
    write_matrix_market_columns(&path, &[vec![1.0, 0.1], vec![-2.0, 1.0 / 3.0]]).unwrap();
    let back = read_matrix_market_columns(&path).unwrap();
    assert_eq!(back[1][1], Complex64::new(1.0 / 3.0, 0.0));
    assert_eq!(back[0][1].re, 0.1);
}

#[test]
fn unequal_columns_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(write_matrix_market_columns(dir.path().join("x.mtx"), &[vec![1.0], vec![1.0, 2.0]]).is_err());
}

#[test]
fn malformed_header_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.mtx");
    std::fs::write(&path, "%%MatrixMarket tensor coordinate real general\n1 1 1\n1 1 1\n").unwrap();
    assert!(read_matrix_market(&path).is_err());
}
