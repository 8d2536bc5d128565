use serde::{Deserialize, Serialize};

use super::{MetricsError, Result};
use crate::numerics::DenseMatrix;

/// Kernel family for the squared-MMD statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum MmdKernelSpec {
    /// Gaussian kernel `exp(-r^2 / (2 sigma^2))`.
    #[serde(rename = "RBFG")]
    Rbfg { sigma: f64 },
    /// Inverse multiquadric `C / (C + r^2)`.
    #[serde(rename = "IMQ")]
    Imq { scale: f64 },
}

impl MmdKernelSpec {
    pub fn validate(&self) -> Result<()> {
        let value = match self {
            MmdKernelSpec::Rbfg { sigma } => *sigma,
            MmdKernelSpec::Imq { scale } => *scale,
        };
        if value <= 0.0 {
            return Err(MetricsError::InvalidKernelParameter(value));
        }
        Ok(())
    }

    #[inline]
    fn eval_r2(&self, r2: f64) -> f64 {
        match self {
            MmdKernelSpec::Rbfg { sigma } => (-r2 / (2.0 * sigma * sigma)).exp(),
            MmdKernelSpec::Imq { scale } => scale / (scale + r2),
        }
    }

    /// Factor `g` with `grad_x k(x, y) = g(r^2) (x - y)`.
    #[inline]
    fn grad_factor_r2(&self, r2: f64) -> f64 {
        match self {
            MmdKernelSpec::Rbfg { sigma } => {
                let s2 = sigma * sigma;
                -(-r2 / (2.0 * s2)).exp() / s2
            }
            MmdKernelSpec::Imq { scale } => {
                let denom = scale + r2;
                -2.0 * scale / (denom * denom)
            }
        }
    }
}

fn r2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Biased squared-MMD V-statistic:
/// `mean k(X,X) + mean k(Y,Y) - 2 mean k(X,Y)`, non-negative for these
/// positive-definite kernels up to rounding.
pub fn mmd_sq(x: &DenseMatrix, y: &DenseMatrix, spec: &MmdKernelSpec) -> Result<f64> {
    spec.validate()?;
    if x.rows() == 0 || y.rows() == 0 {
        return Err(MetricsError::EmptySamples);
    }
    if x.cols() != y.cols() {
        return Err(MetricsError::DimensionMismatch { x: x.cols(), y: y.cols() });
    }
    let (nx, ny) = (x.rows(), y.rows());
    let mut xx = 0.0;
    for i in 0..nx {
        xx += 1.0; // diagonal k(x_i, x_i) = 1 for both families
        for j in (i + 1)..nx {
            xx += 2.0 * spec.eval_r2(r2(x.row(i), x.row(j)));
        }
    }
    let mut yy = 0.0;
    for i in 0..ny {
        yy += 1.0;
        for j in (i + 1)..ny {
            yy += 2.0 * spec.eval_r2(r2(y.row(i), y.row(j)));
        }
    }
    let mut xy = 0.0;
    for i in 0..nx {
        for j in 0..ny {
            xy += spec.eval_r2(r2(x.row(i), y.row(j)));
        }
    }
    Ok(xx / (nx * nx) as f64 + yy / (ny * ny) as f64 - 2.0 * xy / (nx * ny) as f64)
}

/// Squared MMD together with its gradient with respect to every row of `x`.
pub fn mmd_sq_grad_x(
    x: &DenseMatrix,
    y: &DenseMatrix,
    spec: &MmdKernelSpec,
) -> Result<(f64, DenseMatrix)> {
    spec.validate()?;
    if x.rows() == 0 || y.rows() == 0 {
        return Err(MetricsError::EmptySamples);
    }
    if x.cols() != y.cols() {
        return Err(MetricsError::DimensionMismatch { x: x.cols(), y: y.cols() });
    }
    let (nx, ny) = (x.rows(), y.rows());
    let dim = x.cols();
    let mut grad = DenseMatrix::zeros(nx, dim);
    let mut xx = nx as f64; // diagonal terms
    let wxx = 2.0 / (nx * nx) as f64;
    for i in 0..nx {
        for j in (i + 1)..nx {
            let rij = r2(x.row(i), x.row(j));
            xx += 2.0 * spec.eval_r2(rij);
            let factor = spec.grad_factor_r2(rij);
            for d in 0..dim {
                let diff = x[(i, d)] - x[(j, d)];
                // Both k(x_i, .) and k(., x_j) terms; symmetry doubles each.
                grad[(i, d)] += wxx * factor * diff;
                grad[(j, d)] -= wxx * factor * diff;
            }
        }
    }
    let mut yy = ny as f64;
    for i in 0..ny {
        for j in (i + 1)..ny {
            yy += 2.0 * spec.eval_r2(r2(y.row(i), y.row(j)));
        }
    }
    let mut xy = 0.0;
    let wxy = 2.0 / (nx * ny) as f64;
    for i in 0..nx {
        for j in 0..ny {
            let rij = r2(x.row(i), y.row(j));
            xy += spec.eval_r2(rij);
            let factor = spec.grad_factor_r2(rij);
            for d in 0..dim {
                grad[(i, d)] -= wxy * factor * (x[(i, d)] - y[(j, d)]);
            }
        }
    }
    let value = xx / (nx * nx) as f64 + yy / (ny * ny) as f64 - 2.0 * xy / (nx * ny) as f64;
    Ok((value, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_sets_cancel() {
        let x = DenseMatrix::from_rows(&[vec![0.3, 1.0], vec![-0.4, 0.2]]).unwrap();
        let v = mmd_sq(&x, &x, &MmdKernelSpec::Rbfg { sigma: 1.0 }).unwrap();
        assert!(v.abs() < 1e-12);
        let v = mmd_sq(&x, &x, &MmdKernelSpec::Imq { scale: 1.0 }).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn separated_singletons_gaussian() {
        // X = {0}, Y = {1}: 1 + 1 - 2 exp(-1/2).
        let x = DenseMatrix::from_rows(&[vec![0.0]]).unwrap();
        let y = DenseMatrix::from_rows(&[vec![1.0]]).unwrap();
        let v = mmd_sq(&x, &y, &MmdKernelSpec::Rbfg { sigma: 1.0 }).unwrap();
        let want = 2.0 - 2.0 * (-0.5f64).exp();
        assert!((v - want).abs() < 1e-12);
        assert!((v - 0.78694).abs() < 1e-5);
    }

    #[test]
    fn imq_coincident_singletons() {
        let x = DenseMatrix::from_rows(&[vec![0.0]]).unwrap();
        let v = mmd_sq(&x, &x, &MmdKernelSpec::Imq { scale: 1.0 }).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn nonnegative_and_positive_for_disjoint() {
        let mut rng = crate::numerics::SeededRng::new(17);
        for _ in 0..10 {
            let rows_x: Vec<Vec<f64>> =
                (0..8).map(|_| vec![rng.next_standard_normal(), rng.next_standard_normal()]).collect();
            let rows_y: Vec<Vec<f64>> = (0..8)
                .map(|_| vec![5.0 + rng.next_standard_normal(), rng.next_standard_normal()])
                .collect();
            let x = DenseMatrix::from_rows(&rows_x).unwrap();
            let y = DenseMatrix::from_rows(&rows_y).unwrap();
            for spec in [MmdKernelSpec::Rbfg { sigma: 1.0 }, MmdKernelSpec::Imq { scale: 1.0 }] {
                let v = mmd_sq(&x, &y, &spec).unwrap();
                assert!(v >= -1e-12);
                assert!(v > 1e-4, "disjoint clusters should separate: {v}");
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = crate::numerics::SeededRng::new(23);
        let x = DenseMatrix::from_rows(
            &(0..4)
                .map(|_| vec![rng.next_standard_normal(), rng.next_standard_normal()])
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let y = DenseMatrix::from_rows(
            &(0..5)
                .map(|_| vec![1.0 + rng.next_standard_normal(), rng.next_standard_normal()])
                .collect::<Vec<_>>(),
        )
        .unwrap();
        for spec in [MmdKernelSpec::Rbfg { sigma: 0.8 }, MmdKernelSpec::Imq { scale: 1.3 }] {
            let (value, grad) = mmd_sq_grad_x(&x, &y, &spec).unwrap();
            let direct = mmd_sq(&x, &y, &spec).unwrap();
            assert!((value - direct).abs() < 1e-12);
            let h = 1e-6;
            for i in 0..x.rows() {
                for d in 0..x.cols() {
                    let mut xp = x.clone();
                    xp[(i, d)] += h;
                    let mut xm = x.clone();
                    xm[(i, d)] -= h;
                    let fd = (mmd_sq(&xp, &y, &spec).unwrap() - mmd_sq(&xm, &y, &spec).unwrap())
                        / (2.0 * h);
                    let scale = grad[(i, d)].abs().max(fd.abs()).max(1e-8);
                    assert!(
                        (grad[(i, d)] - fd).abs() / scale < 1e-4,
                        "{spec:?} ({i},{d}): {} vs {fd}",
                        grad[(i, d)]
                    );
                }
            }
        }
    }

    #[test]
    fn invalid_bandwidth_rejected() {
        let x = DenseMatrix::from_rows(&[vec![0.0]]).unwrap();
        assert!(matches!(
            mmd_sq(&x, &x, &MmdKernelSpec::Rbfg { sigma: 0.0 }),
            Err(MetricsError::InvalidKernelParameter(_))
        ));
    }
}
