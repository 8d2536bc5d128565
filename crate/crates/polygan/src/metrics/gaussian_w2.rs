use super::{MetricsError, Result};
use crate::numerics::{spd_sqrt, DenseMatrix, SpdMatrix};

/// First two moments of a distribution, either specified or estimated.
#[derive(Debug, Clone)]
pub struct GaussianMoments {
    pub mean: Vec<f64>,
    pub cov: SpdMatrix,
}

impl GaussianMoments {
    pub fn new(mean: Vec<f64>, cov: SpdMatrix) -> Result<Self> {
        if mean.len() != cov.dim() {
            return Err(MetricsError::DimensionMismatch { x: mean.len(), y: cov.dim() });
        }
        Ok(Self { mean, cov })
    }

    /// Sample mean and unbiased covariance of the rows of `samples`.
    pub fn estimate(samples: &DenseMatrix) -> Result<Self> {
        let n = samples.rows();
        let dim = samples.cols();
        if n < 2 {
            return Err(MetricsError::EmptySamples);
        }
        let mut mean = vec![0.0; dim];
        for i in 0..n {
            for (m, x) in mean.iter_mut().zip(samples.row(i)) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        let mut cov = DenseMatrix::zeros(dim, dim);
        let mut centered = vec![0.0; dim];
        for i in 0..n {
            for (c, (x, m)) in centered.iter_mut().zip(samples.row(i).iter().zip(&mean)) {
                *c = x - m;
            }
            for a in 0..dim {
                let ca = centered[a];
                for b in a..dim {
                    cov[(a, b)] += ca * centered[b];
                }
            }
        }
        let denom = (n - 1) as f64;
        for a in 0..dim {
            for b in a..dim {
                let v = cov[(a, b)] / denom;
                cov[(a, b)] = v;
                cov[(b, a)] = v;
            }
        }
        Ok(Self { mean, cov: SpdMatrix::new(cov)? })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Squared Wasserstein-2 distance between Gaussians:
///
/// ```text
/// |mu_p - mu_q|^2 + Tr( S_p + S_q - 2 (S_p^1/2 S_q S_p^1/2)^1/2 )
/// ```
///
/// The cross term uses the symmetrized product, which has the same trace as
/// `sqrt(S_p S_q)` but stays SPD under rounding.
pub fn w22_gaussian(p: &GaussianMoments, q: &GaussianMoments) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(MetricsError::DimensionMismatch { x: p.dim(), y: q.dim() });
    }
    let mean_sq: f64 = p.mean.iter().zip(&q.mean).map(|(a, b)| (a - b) * (a - b)).sum();

    let root_p = spd_sqrt(&p.cov)?;
    let inner = root_p.as_matrix().matmul(q.cov.as_matrix()).matmul(root_p.as_matrix());
    // Symmetrize against rounding before the PSD check.
    let dim = p.dim();
    let mut sym = DenseMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            sym[(i, j)] = 0.5 * (inner[(i, j)] + inner[(j, i)]);
        }
    }
    let cross = spd_sqrt(&SpdMatrix::new(sym)?)?;
    let trace_term = p.cov.trace() + q.cov.trace() - 2.0 * cross.trace();
    Ok(mean_sq + trace_term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SeededRng;

    fn iso(dim: usize, mean_val: f64, var: f64) -> GaussianMoments {
        GaussianMoments::new(
            vec![mean_val; dim],
            SpdMatrix::scaled_identity(dim, var).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn identical_moments_give_zero() {
        let p = iso(3, 1.0, 2.0);
        assert!(w22_gaussian(&p, &p).unwrap().abs() < 1e-10);
    }

    #[test]
    fn equal_covariance_reduces_to_mean_offset() {
        let p = iso(2, 0.0, 1.5);
        let q = iso(2, 3.0, 1.5);
        // |mu|^2 = 2 * 9 = 18.
        assert!((w22_gaussian(&p, &q).unwrap() - 18.0).abs() < 1e-9);
    }

    #[test]
    fn benchmark_target_distance() {
        // N(3.5 1_2, 1.25 I) vs N(0, I): 24.5 + 2 (2.25 - 2 sqrt(1.25)).
        let p = iso(2, 3.5, 1.25);
        let q = iso(2, 0.0, 1.0);
        let want = 24.5 + 2.0 * (2.25 - 2.0 * 1.25f64.sqrt());
        let got = w22_gaussian(&p, &q).unwrap();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        assert!((got - 24.5279).abs() < 1e-4);
    }

    #[test]
    fn symmetric_in_arguments() {
        let mut rng = SeededRng::new(6);
        for _ in 0..5 {
            let dim = 1 + (rng.next_u64() % 4) as usize;
            let mk = |rng: &mut SeededRng| {
                let mut g = DenseMatrix::zeros(dim, dim);
                for i in 0..dim {
                    for j in 0..dim {
                        g[(i, j)] = rng.next_standard_normal();
                    }
                }
                let mut ggt = g.matmul(&g.transpose());
                for i in 0..dim {
                    ggt[(i, i)] += 0.1;
                }
                let mean: Vec<f64> = (0..dim).map(|_| rng.next_standard_normal()).collect();
                GaussianMoments::new(mean, SpdMatrix::new(ggt).unwrap()).unwrap()
            };
            let p = mk(&mut rng);
            let q = mk(&mut rng);
            let a = w22_gaussian(&p, &q).unwrap();
            let b = w22_gaussian(&q, &p).unwrap();
            assert!((a - b).abs() < 1e-8 * a.abs().max(1.0), "{a} vs {b}");
            assert!(a >= -1e-10);
        }
    }

    #[test]
    fn one_dimensional_closed_form() {
        // In 1-D: (mu1 - mu2)^2 + (s1 - s2)^2.
        let p = GaussianMoments::new(vec![1.0], SpdMatrix::scaled_identity(1, 4.0).unwrap()).unwrap();
        let q = GaussianMoments::new(vec![-2.0], SpdMatrix::scaled_identity(1, 9.0).unwrap()).unwrap();
        let want = 9.0 + (2.0f64 - 3.0).powi(2);
        assert!((w22_gaussian(&p, &q).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn estimate_recovers_moments() {
        let mut rng = SeededRng::new(42);
        let cov = SpdMatrix::new(
            DenseMatrix::from_rows(&[vec![2.0, 0.6], vec![0.6, 1.0]]).unwrap(),
        )
        .unwrap();
        let samples =
            crate::numerics::sample_gaussian(&mut rng, &[1.0, -2.0], &cov, 40_000).unwrap();
        let m = GaussianMoments::estimate(&samples).unwrap();
        assert!((m.mean[0] - 1.0).abs() < 0.05);
        assert!((m.mean[1] + 2.0).abs() < 0.05);
        for a in 0..2 {
            for b in 0..2 {
                assert!((m.cov.as_matrix()[(a, b)] - cov.as_matrix()[(a, b)]).abs() < 0.1);
            }
        }
    }
}
