use super::{PolyharmonicError, Result};

pub const DEFAULT_R_MIN: f64 = 1e-12;

/// The polyharmonic radial kernel `psi_{2m-n}`:
///
/// ```text
/// psi_k(r) = r^k          if k < 0 or n odd,
/// psi_k(r) = r^k ln(r)    if k >= 0 and n even,
/// ```
///
/// with `k = 2m - n` for gradient order `m` and data dimension `n`. For
/// `k <= 0` the kernel is unbounded at the origin and evaluation inside the
/// guard radius `r_min` is an error rather than a clamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyKernel {
    m: u32,
    n: u32,
    k: i32,
    log_branch: bool,
    r_min: f64,
}

impl PolyKernel {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m < 1 || n < 1 {
            return Err(PolyharmonicError::InvalidParams { m, n });
        }
        let k = 2 * m as i32 - n as i32;
        Ok(Self {
            m,
            n,
            k,
            log_branch: k >= 0 && n % 2 == 0,
            r_min: DEFAULT_R_MIN,
        })
    }

    pub fn with_r_min(mut self, r_min: f64) -> Self {
        self.r_min = r_min;
        self
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    /// Spline exponent `k = 2m - n`.
    pub fn exponent(&self) -> i32 {
        self.k
    }

    pub fn log_branch(&self) -> bool {
        self.log_branch
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    /// Kernel value at radius `r >= 0`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        self.eval_r2(r * r)
    }

    /// Kernel value from the squared radius. The even-exponent cases never
    /// need a square root, which matters in the training hot loop.
    #[inline]
    pub fn eval_r2(&self, r2: f64) -> Result<f64> {
        let k = self.k;
        if k <= 0 && r2 < self.r_min * self.r_min {
            return Err(PolyharmonicError::SingularRadius {
                k,
                radius: r2.sqrt(),
                r_min: self.r_min,
            });
        }
        if r2 == 0.0 {
            // k > 0 here; both branches extend continuously by 0.
            return Ok(0.0);
        }
        let power = if k % 2 == 0 {
            r2.powi(k / 2)
        } else {
            r2.sqrt().powi(k)
        };
        if self.log_branch {
            Ok(power * 0.5 * r2.ln())
        } else {
            Ok(power)
        }
    }

    /// Scalar factor `g(r)` such that `grad psi(|x - c|) = g(r) (x - c)`.
    ///
    /// Power branch: `k r^{k-2}`; log branch: `r^{k-2} (k ln r + 1)`.
    /// For `k <= 2` the factor is unbounded at the origin, guarded by `r_min`;
    /// for `k > 2` the gradient extends continuously by zero.
    #[inline]
    pub fn grad_factor_r2(&self, r2: f64) -> Result<f64> {
        let k = self.k;
        if r2 < self.r_min * self.r_min {
            if k <= 2 {
                return Err(PolyharmonicError::SingularRadius {
                    k,
                    radius: r2.sqrt(),
                    r_min: self.r_min,
                });
            }
            return Ok(0.0);
        }
        let power = if k % 2 == 0 {
            r2.powi(k / 2 - 1)
        } else {
            r2.sqrt().powi(k - 2)
        };
        if self.log_branch {
            Ok(power * (0.5 * k as f64 * r2.ln() + 1.0))
        } else {
            Ok(power * k as f64)
        }
    }

    /// Gradient of `x -> psi(|x - c|)` with respect to `x`.
    pub fn grad(&self, x: &[f64], c: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() || c.len() != self.dim() {
            return Err(PolyharmonicError::DimensionMismatch {
                got: x.len().max(c.len()),
                want: self.dim(),
            });
        }
        let r2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
        let factor = self.grad_factor_r2(r2)?;
        Ok(x.iter().zip(c).map(|(a, b)| factor * (a - b)).collect())
    }
}

/// `r^{-n}`, the inverse-power kernel appearing in the dual-variable bound.
/// Always on the power branch; singular at the origin for every `n >= 1`.
pub fn inverse_power_eval(n: u32, r2: f64, r_min: f64) -> Result<f64> {
    if r2 < r_min * r_min {
        return Err(PolyharmonicError::SingularRadius {
            k: -(n as i32),
            radius: r2.sqrt(),
            r_min,
        });
    }
    let k = -(n as i32);
    if n % 2 == 0 {
        Ok(r2.powi(k / 2))
    } else {
        Ok(r2.sqrt().powi(k))
    }
}
