//! Dense and sparse linear algebra kernels.

pub mod banded;
pub mod dense;
pub mod eigen;
pub mod lstsq;
pub mod operator;
pub mod sparse;
pub mod svd;
pub mod vector;

pub use banded::BandLu;
pub use dense::{DenseMatrix, Lu};
pub use eigen::{eig, eigenvalues, hessenberg_eigenvalues};
pub use lstsq::{least_squares_hessenberg, HessenbergLsq};
pub use operator::{AdjointOperator, LinearOperator, Preconditioner, RightPreconditioned};
pub use sparse::SparseMatrix;
pub use svd::{hermitian_eigen, singular_values, spectral_norm, symmetric_eigen};
