//! Convergence measurement: Wasserstein-2 between Gaussians in closed form,
//! empirical Wasserstein-2 through an exact assignment solve, squared MMD
//! statistics, and mode-coverage diagnostics for mixture targets.

mod assignment;
mod coverage;
mod gaussian_w2;
mod mmd;

pub use assignment::{min_cost_assignment, w22_empirical};
pub use coverage::mode_coverage;
pub use gaussian_w2::{w22_gaussian, GaussianMoments};
pub use mmd::{mmd_sq, mmd_sq_grad_x, MmdKernelSpec};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("sample sets must have equal size, got {x} and {y}")]
    SizeMismatch { x: usize, y: usize },
    #[error("dimension mismatch: {x} vs {y}")]
    DimensionMismatch { x: usize, y: usize },
    #[error("sample set is empty")]
    EmptySamples,
    #[error("kernel parameter must be positive, got {0}")]
    InvalidKernelParameter(f64),
    #[error(transparent)]
    Numerics(#[from] crate::numerics::NumericsError),
}

pub type Result<T> = std::result::Result<T, MetricsError>;
