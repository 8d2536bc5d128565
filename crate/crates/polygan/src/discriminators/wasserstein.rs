use super::{DiscriminatorError, Result};
use crate::numerics::DenseMatrix;
use crate::polyharmonic::{inverse_power_eval, KernelConstants, PolyKernel};

/// Lower floor for the estimated dual-variable bound.
pub const LAMBDA_MIN: f64 = 1e-6;

/// Fixed-weight kernel-sum critic over paired fake/real center batches:
///
/// ```text
/// D(x) = weight_scale * ( sum_fakes psi(|x - c_i|) - sum_reals psi(|x - c_j|) )
/// ```
///
/// No system is solved; the batch is the discriminator.
#[derive(Debug, Clone)]
pub struct WRbfDiscriminator {
    kernel: PolyKernel,
    fake_centers: DenseMatrix,
    real_centers: DenseMatrix,
    weight_scale: f64,
}

/// Build the critic from fresh center batches. `weight_scale` is
/// `xi / (lambda_d N)` in magnitude; its sign is fixed so that, for every
/// kernel order, the critic comes out negative in fake neighborhoods and
/// positive in real ones (for increasing kernels the raw difference already
/// does this, for the singular decreasing kernels `k < 0` it is reversed).
pub fn build_w_discriminator(
    kernel: PolyKernel,
    constants: &KernelConstants,
    fake_centers: DenseMatrix,
    real_centers: DenseMatrix,
    lambda_d: f64,
) -> Result<WRbfDiscriminator> {
    if fake_centers.rows() == 0 {
        return Err(DiscriminatorError::EmptyBatch("fake"));
    }
    if real_centers.rows() == 0 {
        return Err(DiscriminatorError::EmptyBatch("real"));
    }
    if fake_centers.rows() != real_centers.rows() {
        return Err(DiscriminatorError::BatchSizeMismatch {
            fakes: fake_centers.rows(),
            reals: real_centers.rows(),
        });
    }
    let dim = kernel.dim();
    if fake_centers.cols() != dim || real_centers.cols() != dim {
        return Err(DiscriminatorError::DimensionMismatch {
            want: dim,
            got: fake_centers.cols().max(real_centers.cols()),
        });
    }

    let orientation = if kernel.exponent() >= 0 { 1.0 } else { -1.0 };
    let weight_scale =
        orientation * constants.xi.abs() / (lambda_d * fake_centers.rows() as f64);
    if !weight_scale.is_finite() || weight_scale == 0.0 {
        return Err(DiscriminatorError::InvalidWeightScale { xi: constants.xi, lambda_d });
    }

    Ok(WRbfDiscriminator { kernel, fake_centers, real_centers, weight_scale })
}

impl WRbfDiscriminator {
    pub fn kernel(&self) -> &PolyKernel {
        &self.kernel
    }

    pub fn weight_scale(&self) -> f64 {
        self.weight_scale
    }

    pub fn fake_centers(&self) -> &DenseMatrix {
        &self.fake_centers
    }

    pub fn real_centers(&self) -> &DenseMatrix {
        &self.real_centers
    }

    /// Critic value at `x`. The two kernel sums are accumulated separately in
    /// identical order, so equal fake/real batches cancel exactly.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let fake = self.kernel_sum(&self.fake_centers, x)?;
        let real = self.kernel_sum(&self.real_centers, x)?;
        Ok(self.weight_scale * (fake - real))
    }

    fn kernel_sum(&self, centers: &DenseMatrix, x: &[f64]) -> Result<f64> {
        debug_assert_eq!(x.len(), self.kernel.dim());
        let mut acc = 0.0;
        for i in 0..centers.rows() {
            let r2: f64 = centers.row(i).iter().zip(x).map(|(c, xi)| (xi - c) * (xi - c)).sum();
            acc += self.kernel.eval_r2(r2)?;
        }
        Ok(acc)
    }

    /// Gradient of the critic with respect to the input point.
    pub fn grad_x(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.kernel.dim()];
        self.grad_accum(x, &mut out)?;
        Ok(out)
    }

    /// Accumulate the critic gradient into `out` without allocating.
    pub fn grad_accum(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(out.len(), self.kernel.dim());
        let dim = self.kernel.dim();
        let mut fake = vec![0.0; dim];
        let mut real = vec![0.0; dim];
        self.grad_sum(&self.fake_centers, x, &mut fake)?;
        self.grad_sum(&self.real_centers, x, &mut real)?;
        for d in 0..dim {
            out[d] += self.weight_scale * (fake[d] - real[d]);
        }
        Ok(())
    }

    fn grad_sum(&self, centers: &DenseMatrix, x: &[f64], acc: &mut [f64]) -> Result<()> {
        for i in 0..centers.rows() {
            let center = centers.row(i);
            let mut r2 = 0.0;
            for (c, xi) in center.iter().zip(x.iter()) {
                let d = xi - c;
                r2 += d * d;
            }
            let factor = self.kernel.grad_factor_r2(r2)?;
            if factor == 0.0 {
                continue;
            }
            for (a, (c, xi)) in acc.iter_mut().zip(center.iter().zip(x.iter())) {
                *a += factor * (xi - c);
            }
        }
        Ok(())
    }
}

/// Sample estimate of the upper bound on the optimal dual variable:
///
/// ```text
/// (|xi| eps / (M N sqrt(K))) sqrt(m! S_alpha)
///     * sqrt( sum_l ( sum_fakes psi_{-n}(x_l - c_i)
///                   - sum_reals psi_{-n}(x_l - c_j) )^2 )
/// ```
///
/// floored at `LAMBDA_MIN` so a cancelling batch still yields a usable scale.
pub fn estimate_lambda_bound(
    kernel: &PolyKernel,
    constants: &KernelConstants,
    fake_centers: &DenseMatrix,
    real_centers: &DenseMatrix,
    eval_points: &DenseMatrix,
    constraint_level: f64,
) -> Result<f64> {
    if constraint_level <= 0.0 {
        return Err(DiscriminatorError::InvalidConstraintLevel(constraint_level));
    }
    if eval_points.rows() == 0 {
        return Err(DiscriminatorError::EmptyBatch("evaluation"));
    }
    if fake_centers.rows() == 0 || real_centers.rows() == 0 {
        return Err(DiscriminatorError::EmptyBatch("center"));
    }
    let n = kernel.dim() as u32;
    let n_samples = fake_centers.rows().max(real_centers.rows());
    let n_points = eval_points.rows();

    let mut sq_sum = 0.0;
    for l in 0..n_points {
        let x = eval_points.row(l);
        let fake = inv_power_sum(n, fake_centers, x, kernel.r_min())?;
        let real = inv_power_sum(n, real_centers, x, kernel.r_min())?;
        let diff = fake - real;
        sq_sum += diff * diff;
    }

    let m_factorial: f64 = (1..=kernel.order() as u64).map(|v| v as f64).product();
    let bound = constants.xi.abs() * constants.epsilon_bound
        / (n_points as f64 * n_samples as f64 * constraint_level.sqrt())
        * (m_factorial * constants.s_alpha).sqrt()
        * sq_sum.sqrt();
    Ok(bound.max(LAMBDA_MIN))
}

fn inv_power_sum(n: u32, centers: &DenseMatrix, x: &[f64], r_min: f64) -> Result<f64> {
    let mut acc = 0.0;
    for i in 0..centers.rows() {
        let r2: f64 = centers.row(i).iter().zip(x).map(|(c, xi)| (xi - c) * (xi - c)).sum();
        acc += inverse_power_eval(n, r2, r_min)?;
    }
    Ok(acc)
}
