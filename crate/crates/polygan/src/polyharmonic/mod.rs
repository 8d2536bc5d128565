//! Polyharmonic kernel machinery shared by both closed-form discriminators:
//! multi-index bookkeeping for higher-order gradients, the radial kernel
//! `psi_k` with its two branches and derivatives, the fundamental-solution
//! constants, and the polynomial null-space basis.

mod basis;
mod constants;
mod kernel;
mod multi_index;

pub use basis::PolyBasis;
pub use constants::{compute_constants, KernelConstants};
pub use kernel::{inverse_power_eval, PolyKernel};
pub use multi_index::{enumerate_multi_indices, grad_norm_sq, MultiIndex};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolyharmonicError {
    #[error("multinomial coefficient overflows 64-bit range (order {order} too large, cap is 20)")]
    Overflow { order: u32 },
    #[error("kernel of order {k} is singular at radius {radius:.3e} (guard {r_min:.3e})")]
    SingularRadius { k: i32, radius: f64, r_min: f64 },
    #[error("gradient order and dimension must both be at least 1 (got m={m}, n={n})")]
    InvalidParams { m: u32, n: u32 },
    #[error("partial derivative missing for multi-index {0:?}")]
    MissingIndex(Vec<u32>),
    #[error("point has dimension {got}, kernel dimension is {want}")]
    DimensionMismatch { got: usize, want: usize },
}

pub type Result<T> = std::result::Result<T, PolyharmonicError>;

/// Exact binomial coefficient in u64, or `None` on overflow.
pub(crate) fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
    }
    Some(acc)
}
