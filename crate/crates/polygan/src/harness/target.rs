use serde::{Deserialize, Serialize};

use super::{HarnessError, Result};
use crate::metrics::GaussianMoments;
use crate::numerics::{DenseMatrix, GaussianSampler, SeededRng, SpdMatrix};

/// Data distribution to learn.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TargetSpec {
    /// Single Gaussian with explicit moments.
    Gaussian { mean: Vec<f64>, cov: Vec<Vec<f64>> },
    /// Components spread uniformly on a circle, isotropic with std `sigma`.
    GmmCircle {
        #[serde(default = "default_components")]
        components: usize,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default = "default_sigma")]
        sigma: f64,
    },
    /// Arbitrary mixture.
    GmmCustom { components: Vec<GmmComponent> },
}

fn default_components() -> usize {
    8
}
fn default_radius() -> f64 {
    1.0
}
fn default_sigma() -> f64 {
    0.02
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GmmComponent {
    pub weight: f64,
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
}

impl TargetSpec {
    /// Unimodal benchmark target `N(3.5 1_2, 1.25 I_2)`.
    pub fn gaussian_2d_wgan() -> Self {
        TargetSpec::Gaussian {
            mean: vec![3.5, 3.5],
            cov: vec![vec![1.25, 0.0], vec![0.0, 1.25]],
        }
    }

    /// Unimodal benchmark target `N(5 1_2, 1.5 I_2)`.
    pub fn gaussian_2d_lsgan() -> Self {
        TargetSpec::Gaussian { mean: vec![5.0, 5.0], cov: vec![vec![1.5, 0.0], vec![0.0, 1.5]] }
    }

    /// Isotropic Gaussian `N(mean_value 1_n, var I_n)`.
    pub fn gaussian_iso(n: usize, mean_value: f64, var: f64) -> Self {
        let mut cov = vec![vec![0.0; n]; n];
        for (i, row) in cov.iter_mut().enumerate() {
            row[i] = var;
        }
        TargetSpec::Gaussian { mean: vec![mean_value; n], cov }
    }

    /// Eight tight modes on the unit circle.
    pub fn gmm_circle_8() -> Self {
        TargetSpec::GmmCircle { components: 8, radius: 1.0, sigma: 0.02 }
    }

    pub fn dim(&self) -> usize {
        match self {
            TargetSpec::Gaussian { mean, .. } => mean.len(),
            TargetSpec::GmmCircle { .. } => 2,
            TargetSpec::GmmCustom { components } => {
                components.first().map_or(0, |c| c.mean.len())
            }
        }
    }

    pub fn is_unimodal_gaussian(&self) -> bool {
        matches!(self, TargetSpec::Gaussian { .. })
    }

    /// Mode means for coverage diagnostics (mixtures only).
    pub fn mode_means(&self) -> Vec<Vec<f64>> {
        match self {
            TargetSpec::Gaussian { mean, .. } => vec![mean.clone()],
            TargetSpec::GmmCircle { components, radius, .. } => (0..*components)
                .map(|j| {
                    let angle = std::f64::consts::TAU * j as f64 / *components as f64;
                    vec![radius * angle.cos(), radius * angle.sin()]
                })
                .collect(),
            TargetSpec::GmmCustom { components } => {
                components.iter().map(|c| c.mean.clone()).collect()
            }
        }
    }

    /// Closed-form moments, available for the unimodal case.
    pub fn moments(&self) -> Result<Option<GaussianMoments>> {
        match self {
            TargetSpec::Gaussian { mean, cov } => {
                let cov = SpdMatrix::new(DenseMatrix::from_rows(cov)?)?;
                Ok(Some(GaussianMoments::new(mean.clone(), cov)?))
            }
            _ => Ok(None),
        }
    }

    pub fn build_sampler(&self) -> Result<TargetSampler> {
        match self {
            TargetSpec::Gaussian { mean, cov } => {
                let cov = SpdMatrix::new(DenseMatrix::from_rows(cov)?)?;
                if mean.is_empty() {
                    return Err(HarnessError::Config("target mean must be non-empty".into()));
                }
                Ok(TargetSampler {
                    components: vec![Component {
                        cumulative_weight: 1.0,
                        sampler: GaussianSampler::new(mean.clone(), &cov)?,
                    }],
                })
            }
            TargetSpec::GmmCircle { components, radius, sigma } => {
                if *components == 0 {
                    return Err(HarnessError::Config("GmmCircle needs components > 0".into()));
                }
                if *sigma < 0.0 || *radius <= 0.0 {
                    return Err(HarnessError::Config(
                        "GmmCircle radius must be positive and sigma non-negative".into(),
                    ));
                }
                let cov = SpdMatrix::scaled_identity(2, sigma * sigma)?;
                let weight = 1.0 / *components as f64;
                let comps = self
                    .mode_means()
                    .into_iter()
                    .enumerate()
                    .map(|(j, mean)| {
                        Ok(Component {
                            cumulative_weight: weight * (j + 1) as f64,
                            sampler: GaussianSampler::new(mean, &cov)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(TargetSampler { components: comps })
            }
            TargetSpec::GmmCustom { components } => {
                if components.is_empty() {
                    return Err(HarnessError::Config("GmmCustom needs components".into()));
                }
                let total: f64 = components.iter().map(|c| c.weight).sum();
                if (total - 1.0).abs() > 1e-9 || components.iter().any(|c| c.weight < 0.0) {
                    return Err(HarnessError::Config(format!(
                        "mixture weights must be non-negative and sum to 1 (sum = {total})"
                    )));
                }
                let dim = components[0].mean.len();
                let mut cumulative = 0.0;
                let comps = components
                    .iter()
                    .map(|c| {
                        if c.mean.len() != dim {
                            return Err(HarnessError::Config(
                                "mixture components must share a dimension".into(),
                            ));
                        }
                        cumulative += c.weight;
                        let cov = SpdMatrix::new(DenseMatrix::from_rows(&c.cov)?)?;
                        Ok(Component {
                            cumulative_weight: cumulative,
                            sampler: GaussianSampler::new(c.mean.clone(), &cov)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(TargetSampler { components: comps })
            }
        }
    }
}

struct Component {
    cumulative_weight: f64,
    sampler: GaussianSampler,
}

/// Seedable sampler with all covariance square roots factored up front.
pub struct TargetSampler {
    components: Vec<Component>,
}

impl TargetSampler {
    pub fn dim(&self) -> usize {
        self.components[0].sampler.dim()
    }

    pub fn sample(&self, rng: &mut SeededRng, count: usize) -> DenseMatrix {
        if self.components.len() == 1 {
            return self.components[0].sampler.sample(rng, count);
        }
        let dim = self.dim();
        let mut out = DenseMatrix::zeros(count, dim);
        for i in 0..count {
            let u = rng.next_f64();
            let component = self
                .components
                .iter()
                .find(|c| u < c.cumulative_weight)
                .unwrap_or_else(|| self.components.last().unwrap());
            let row = component.sampler.sample(rng, 1);
            out.row_mut(i).copy_from_slice(row.row(0));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::mode_coverage;

    #[test]
    fn circle_modes_are_on_the_unit_circle() {
        let spec = TargetSpec::gmm_circle_8();
        let modes = spec.mode_means();
        assert_eq!(modes.len(), 8);
        for (j, m) in modes.iter().enumerate() {
            let angle = std::f64::consts::TAU * j as f64 / 8.0;
            assert!((m[0] - angle.cos()).abs() < 1e-15);
            assert!((m[1] - angle.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_covariance_target_is_constant() {
        let spec = TargetSpec::Gaussian {
            mean: vec![1.0, -2.0],
            cov: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        };
        let sampler = spec.build_sampler().unwrap();
        let mut rng = SeededRng::new(4);
        let batch = sampler.sample(&mut rng, 8);
        for i in 0..8 {
            assert_eq!(batch.row(i), &[1.0, -2.0]);
        }
    }

    #[test]
    fn circle_mixture_is_balanced() {
        // 1e5 draws: each mode gets 0.125 within a 3-sigma binomial interval.
        let spec = TargetSpec::gmm_circle_8();
        let sampler = spec.build_sampler().unwrap();
        let mut rng = SeededRng::new(123);
        let batch = sampler.sample(&mut rng, 100_000);
        let fractions = mode_coverage(&batch, &spec.mode_means(), 0.1);
        for (j, f) in fractions.iter().enumerate() {
            assert!((f - 0.125).abs() < 0.01, "mode {j}: fraction {f}");
        }
    }

    #[test]
    fn custom_mixture_weights_validated() {
        let spec = TargetSpec::GmmCustom {
            components: vec![GmmComponent {
                weight: 0.5,
                mean: vec![0.0],
                cov: vec![vec![1.0]],
            }],
        };
        assert!(spec.build_sampler().is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = TargetSpec::gmm_circle_8();
        let sampler = spec.build_sampler().unwrap();
        let a = sampler.sample(&mut SeededRng::new(5), 64);
        let b = sampler.sample(&mut SeededRng::new(5), 64);
        assert_eq!(a.data(), b.data());
    }
}
