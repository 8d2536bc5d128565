//! The two closed-form discriminators.
//!
//! `LsRbfDiscriminator` interpolates class labels with a polyharmonic spline
//! whose weights come from one saddle-point solve per batch.
//! `WRbfDiscriminator` skips the solve entirely: every center carries the
//! same fixed weight, and the critic is the difference of two kernel sums
//! over fake and real center batches.

mod least_squares;
mod wasserstein;

pub use least_squares::{fit_ls_discriminator, ClassLabels, LsRbfDiscriminator};
pub use wasserstein::{build_w_discriminator, estimate_lambda_bound, WRbfDiscriminator};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiscriminatorError {
    #[error("spline exponent 2m-n = {k} must be positive for the least-squares fit")]
    InvalidOrder { k: i32 },
    #[error("centers {i} and {j} are closer than {threshold:.1e}")]
    DuplicateCenters { i: usize, j: usize, threshold: f64 },
    #[error("polynomial side-condition matrix is rank deficient (centers lie on a subspace)")]
    RankDeficientB,
    #[error("{0} center batch is empty")]
    EmptyBatch(&'static str),
    #[error("fake and real batches must have equal size, got {fakes} and {reals}")]
    BatchSizeMismatch { fakes: usize, reals: usize },
    #[error("need at least {need} centers for {got} polynomial terms")]
    InsufficientCenters { need: usize, got: usize },
    #[error("gradient-energy quadratic form is negative ({0:.3e}); kernel constant sign is inconsistent")]
    NegativeEnergy(f64),
    #[error("kernel weight scale is zero or non-finite (xi = {xi:.3e}, lambda_d = {lambda_d:.3e})")]
    InvalidWeightScale { xi: f64, lambda_d: f64 },
    #[error("constraint level K must be positive, got {0}")]
    InvalidConstraintLevel(f64),
    #[error("dimension mismatch: expected {want}, got {got}")]
    DimensionMismatch { want: usize, got: usize },
    #[error(transparent)]
    Kernel(#[from] crate::polyharmonic::PolyharmonicError),
    #[error(transparent)]
    Numerics(#[from] crate::numerics::NumericsError),
    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, DiscriminatorError>;
