use serde::{Deserialize, Serialize};

use super::{HarnessError, Result, TargetSpec};
use crate::discriminators::ClassLabels;
use crate::generator::Activation;
use crate::metrics::MmdKernelSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "PolyLSGAN")]
    PolyLsgan,
    #[serde(rename = "PolyWGAN")]
    PolyWgan,
    #[serde(rename = "GMMN-RBFG")]
    GmmnRbfg,
    #[serde(rename = "GMMN-IMQ")]
    GmmnImq,
}

/// How the dual variable is chosen each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum LambdaMode {
    /// Constant value; its effect folds into the generator learning rate.
    Fixed { value: f64 },
    /// Re-estimated from the per-iteration batches via the sample bound.
    Bound,
}

impl Default for LambdaMode {
    fn default() -> Self {
        LambdaMode::Fixed { value: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TimingMode {
    /// Record elapsed wall-clock time per metric row.
    #[default]
    Real,
    /// Write zeros; output bytes are then a pure function of (config, seed).
    None,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub struct GeneratorConfig {
    pub kind: GeneratorKind,
    #[serde(default)]
    pub noise_dim: Option<usize>,
    #[serde(default = "default_hidden")]
    pub hidden: Vec<usize>,
    #[serde(default = "default_activation")]
    pub activation: Activation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Affine,
    Mlp,
}

fn default_hidden() -> Vec<usize> {
    vec![32, 32]
}
fn default_activation() -> Activation {
    Activation::LeakyRelu
}

fn default_rbf_centers() -> usize {
    100
}
fn default_batch_size() -> usize {
    500
}
fn default_generator_lr() -> f64 {
    0.002
}
fn default_metric_cadence() -> u64 {
    100
}

/// Training configuration; every field has the benchmark default.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    /// Data dimension.
    pub n: usize,
    /// Gradient-penalty order; defaults to `ceil(n/2)` (for the least-squares
    /// algorithm, to the smallest order with a positive spline exponent).
    #[serde(default)]
    pub m: Option<u32>,
    #[serde(default = "default_rbf_centers")]
    pub rbf_centers: usize,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_generator_lr")]
    pub generator_lr: f64,
    pub iterations: u64,
    #[serde(default = "default_metric_cadence")]
    pub metric_cadence: u64,
    #[serde(default)]
    pub lambda: LambdaMode,
    pub seed: u64,
    #[serde(default)]
    pub labels: ClassLabels,
    /// Kernel matrix constant of the least-squares penalty term.
    #[serde(default = "default_c_k")]
    pub c_k: f64,
    /// Generator architecture; the default is an identity-initialized affine
    /// map for unimodal Gaussian targets and a small leaky-ReLU MLP otherwise.
    #[serde(default)]
    pub generator: Option<GeneratorConfig>,
    /// Kernel for the moment-matching baselines (family fixed by `algorithm`).
    #[serde(default)]
    pub mmd: Option<MmdKernelSpec>,
    #[serde(default)]
    pub timing: TimingMode,
}

fn default_c_k() -> f64 {
    1.0
}

/// A full experiment: training configuration plus the target distribution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSpec {
    #[serde(flatten)]
    pub train: TrainConfig,
    pub target: TargetSpec,
}

impl TrainConfig {
    /// Gradient order after defaulting.
    pub fn effective_m(&self) -> u32 {
        match self.m {
            Some(m) => m,
            None => match self.algorithm {
                // Smallest order with 2m - n > 0.
                Algorithm::PolyLsgan => (self.n as u32) / 2 + 1,
                _ => (self.n as u32).div_ceil(2),
            },
        }
    }
}

impl RunSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: RunSpec =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.train;
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if t.n == 0 {
            return fail("data dimension n must be positive".into());
        }
        if self.target.dim() != t.n {
            return fail(format!(
                "target dimension {} does not match n = {}",
                self.target.dim(),
                t.n
            ));
        }
        if t.rbf_centers == 0 || t.batch_size == 0 {
            return fail("rbf_centers and batch_size must be positive".into());
        }
        if t.metric_cadence == 0 {
            return fail("metric_cadence must be positive".into());
        }
        if !(t.generator_lr.is_finite() && t.generator_lr > 0.0) {
            return fail(format!("generator_lr must be positive, got {}", t.generator_lr));
        }
        let m = t.effective_m();
        if m == 0 {
            return fail("gradient order m must be at least 1".into());
        }
        if t.labels.a == t.labels.b {
            return fail("class labels a and b must differ".into());
        }
        match t.algorithm {
            Algorithm::PolyLsgan => {
                if 2 * m as i64 - t.n as i64 <= 0 {
                    return fail(format!(
                        "PolyLSGAN requires 2m - n > 0, got m = {m}, n = {}",
                        t.n
                    ));
                }
                if matches!(t.lambda, LambdaMode::Bound) {
                    return fail("lambda mode 'bound' is only available for PolyWGAN".into());
                }
            }
            Algorithm::PolyWgan => {}
            Algorithm::GmmnRbfg | Algorithm::GmmnImq => {
                if let Some(spec) = &t.mmd {
                    let family_matches = matches!(
                        (t.algorithm, spec),
                        (Algorithm::GmmnRbfg, MmdKernelSpec::Rbfg { .. })
                            | (Algorithm::GmmnImq, MmdKernelSpec::Imq { .. })
                    );
                    if !family_matches {
                        return fail("mmd kernel family does not match the algorithm".into());
                    }
                    spec.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
                }
                if matches!(t.lambda, LambdaMode::Bound) {
                    return fail("lambda mode 'bound' is only available for PolyWGAN".into());
                }
            }
        }
        if let LambdaMode::Fixed { value } = t.lambda {
            if !(value.is_finite() && value > 0.0) {
                return fail(format!("fixed lambda must be positive, got {value}"));
            }
        }
        if let Some(g) = &t.generator {
            if g.kind == GeneratorKind::Affine {
                if let Some(nz) = g.noise_dim {
                    if nz < t.n {
                        return fail(format!(
                            "affine generator noise_dim {nz} must be at least n = {}",
                            t.n
                        ));
                    }
                }
            }
            if g.kind == GeneratorKind::Mlp && g.hidden.iter().any(|&h| h == 0) {
                return fail("mlp hidden layer sizes must be positive".into());
            }
        }
        Ok(())
    }

    /// Kernel spec for the moment-matching baselines.
    pub fn mmd_kernel(&self) -> Option<MmdKernelSpec> {
        match self.train.algorithm {
            Algorithm::GmmnRbfg => {
                Some(self.train.mmd.unwrap_or(MmdKernelSpec::Rbfg { sigma: 1.0 }))
            }
            Algorithm::GmmnImq => Some(self.train.mmd.unwrap_or(MmdKernelSpec::Imq { scale: 1.0 })),
            _ => None,
        }
    }
}
