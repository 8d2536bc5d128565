//! Minimal dense linear algebra and deterministic randomness.
//!
//! Everything here is sized for desk-scale experiments (matrix dimensions in
//! the hundreds): LU with partial pivoting for square solves, a cyclic Jacobi
//! eigensolver for symmetric matrices, an eigendecomposition-based matrix
//! square root, and a counter-based RNG with Box-Muller Gaussian sampling so
//! that every run is bit-reproducible.

mod eigen;
mod matrix;
mod rng;
mod solve;

pub use eigen::{spd_sqrt, sym_eigen};
pub use matrix::{DenseMatrix, SpdMatrix};
pub use rng::{sample_gaussian, GaussianSampler, SeededRng};
pub use solve::{lu_solve, LuDecomposition};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("matrix is singular: pivot {pivot:.3e} below threshold {threshold:.3e}")]
    SingularMatrix { pivot: f64, threshold: f64 },
    #[error("Jacobi eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("matrix has negative eigenvalue {0:.3e}")]
    NegativeEigenvalue(f64),
    #[error("matrix is not symmetric: |S[{i},{j}] - S[{j},{i}]| = {delta:.3e}")]
    NotSymmetric { i: usize, j: usize, delta: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite entry at ({0}, {1})")]
    NonFiniteEntry(usize, usize),
}

pub type Result<T> = std::result::Result<T, NumericsError>;
