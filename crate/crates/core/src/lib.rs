//! Polynomial preconditioning and approximate inversion from GMRES
//! residual polynomials.

pub mod analysis;
pub mod composite;
pub mod deflation;
pub mod error;
pub mod krylov;
pub mod linalg;
pub mod matrices;
pub mod multirhs;
pub mod poly;
pub mod precond;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;
