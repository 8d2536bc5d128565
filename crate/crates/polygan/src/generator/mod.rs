//! Small trainable generators with explicit reverse-mode gradients.
//!
//! The architectures are a single affine map and a dense MLP of a few layers,
//! so gradients are hand-chained over the fixed layer graph; the closed-form
//! discriminators supply their input gradients analytically, which keeps the
//! whole training step free of any autodiff machinery.

mod adam;
mod affine;
mod loss;
mod mlp;

pub use adam::{adam_step, AdamState};
pub use affine::AffineGenerator;
pub use loss::{lsgan_generator_loss_and_grad, wgan_generator_grad, wgan_generator_loss_and_grad};
pub use mlp::{Activation, MlpGenerator};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{DenseMatrix, SeededRng};

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("shape mismatch: expected {want}, got {got}")]
    ShapeMismatch { want: usize, got: usize },
    #[error("backward called without a matching forward pass (cached batch: {cached:?}, got {got})")]
    StaleCache { cached: Option<usize>, got: usize },
    #[error("non-finite gradient at optimizer step {step}")]
    NonFiniteGradient { step: u64 },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Discriminator(#[from] crate::discriminators::DiscriminatorError),
}

pub type Result<T> = std::result::Result<T, GeneratorError>;

/// A trainable generator: noise batch in, sample batch out.
#[derive(Debug, Clone)]
pub enum Generator {
    Affine(AffineGenerator),
    Mlp(MlpGenerator),
}

impl Generator {
    pub fn noise_dim(&self) -> usize {
        match self {
            Generator::Affine(g) => g.noise_dim(),
            Generator::Mlp(g) => g.noise_dim(),
        }
    }

    pub fn out_dim(&self) -> usize {
        match self {
            Generator::Affine(g) => g.out_dim(),
            Generator::Mlp(g) => g.out_dim(),
        }
    }

    /// Forward pass that caches intermediates for `backward`.
    pub fn forward(&mut self, z: &DenseMatrix) -> Result<DenseMatrix> {
        match self {
            Generator::Affine(g) => g.forward(z),
            Generator::Mlp(g) => g.forward(z),
        }
    }

    /// Pure forward pass; does not touch the backward cache.
    pub fn forward_inference(&self, z: &DenseMatrix) -> Result<DenseMatrix> {
        match self {
            Generator::Affine(g) => g.forward_inference(z),
            Generator::Mlp(g) => g.forward_inference(z),
        }
    }

    /// Reverse-mode gradients for the cached batch, flattened in parameter order.
    pub fn backward(&mut self, upstream: &DenseMatrix) -> Result<Vec<f64>> {
        match self {
            Generator::Affine(g) => g.backward(upstream),
            Generator::Mlp(g) => g.backward(upstream),
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            Generator::Affine(g) => g.param_count(),
            Generator::Mlp(g) => g.param_count(),
        }
    }

    pub fn params_flat(&self) -> Vec<f64> {
        match self {
            Generator::Affine(g) => g.params_flat(),
            Generator::Mlp(g) => g.params_flat(),
        }
    }

    pub fn set_params_flat(&mut self, params: &[f64]) -> Result<()> {
        match self {
            Generator::Affine(g) => g.set_params_flat(params),
            Generator::Mlp(g) => g.set_params_flat(params),
        }
    }

    /// Draw a noise batch and map it through the generator without caching.
    pub fn sample(&self, rng: &mut SeededRng, count: usize) -> DenseMatrix {
        let mut z = DenseMatrix::zeros(count, self.noise_dim());
        for i in 0..count {
            rng.fill_standard_normal(z.row_mut(i));
        }
        self.forward_inference(&z).expect("noise batch has the generator's noise dimension")
    }

    pub fn to_json(&self) -> String {
        let doc = match self {
            Generator::Affine(g) => g.document(),
            Generator::Mlp(g) => g.document(),
        };
        serde_json::to_string_pretty(&doc).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CheckpointDoc =
            serde_json::from_str(text).map_err(|e| GeneratorError::Checkpoint(e.to_string()))?;
        match doc {
            CheckpointDoc::Affine { .. } => Ok(Generator::Affine(AffineGenerator::from_document(doc)?)),
            CheckpointDoc::Mlp { .. } => Ok(Generator::Mlp(MlpGenerator::from_document(doc)?)),
        }
    }
}

/// Flat JSON checkpoint: layer sizes plus row-major weight arrays.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckpointDoc {
    Affine {
        out_dim: usize,
        noise_dim: usize,
        weight: Vec<f64>,
        bias: Vec<f64>,
    },
    Mlp {
        sizes: Vec<usize>,
        activation: Activation,
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
    },
}
