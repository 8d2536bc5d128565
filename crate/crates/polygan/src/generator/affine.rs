use super::{CheckpointDoc, GeneratorError, Result};
use crate::numerics::DenseMatrix;

/// Single affine map `x = M z + b`.
///
/// Initialized as the (rectangular) identity with zero bias, so a fresh
/// generator passes standard-normal noise through unchanged; the initial
/// output distribution is then exactly `N(0, I)`, which pins the metric
/// logged at iteration zero.
#[derive(Debug, Clone)]
pub struct AffineGenerator {
    weight: DenseMatrix, // out_dim x noise_dim
    bias: Vec<f64>,
    cache: Option<DenseMatrix>,
}

impl AffineGenerator {
    pub fn new_identity(out_dim: usize, noise_dim: usize) -> Self {
        assert!(noise_dim >= out_dim, "identity init needs noise_dim >= out_dim");
        let mut weight = DenseMatrix::zeros(out_dim, noise_dim);
        for i in 0..out_dim {
            weight[(i, i)] = 1.0;
        }
        Self { weight, bias: vec![0.0; out_dim], cache: None }
    }

    pub fn noise_dim(&self) -> usize {
        self.weight.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn weight(&self) -> &DenseMatrix {
        &self.weight
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn forward(&mut self, z: &DenseMatrix) -> Result<DenseMatrix> {
        let out = self.forward_inference(z)?;
        self.cache = Some(z.clone());
        Ok(out)
    }

    pub fn forward_inference(&self, z: &DenseMatrix) -> Result<DenseMatrix> {
        if z.cols() != self.noise_dim() {
            return Err(GeneratorError::ShapeMismatch { want: self.noise_dim(), got: z.cols() });
        }
        let batch = z.rows();
        let mut out = DenseMatrix::zeros(batch, self.out_dim());
        for i in 0..batch {
            let zi = z.row(i);
            let row = out.row_mut(i);
            for (j, slot) in row.iter_mut().enumerate() {
                let mut acc = self.bias[j];
                for (w, zk) in self.weight.row(j).iter().zip(zi) {
                    acc += w * zk;
                }
                *slot = acc;
            }
        }
        Ok(out)
    }

    /// Gradients of the cached batch: `dM = upstream^T z`, `db = column sums`.
    pub fn backward(&mut self, upstream: &DenseMatrix) -> Result<Vec<f64>> {
        let z = self.cache.as_ref().ok_or(GeneratorError::StaleCache {
            cached: None,
            got: upstream.rows(),
        })?;
        if upstream.rows() != z.rows() || upstream.cols() != self.out_dim() {
            return Err(GeneratorError::StaleCache {
                cached: Some(z.rows()),
                got: upstream.rows(),
            });
        }
        let (out_dim, noise_dim) = (self.out_dim(), self.noise_dim());
        let mut grads = vec![0.0; self.param_count()];
        let (dw, db) = grads.split_at_mut(out_dim * noise_dim);
        for i in 0..z.rows() {
            let up = upstream.row(i);
            let zi = z.row(i);
            for (j, &u) in up.iter().enumerate() {
                if u == 0.0 {
                    continue;
                }
                let row = &mut dw[j * noise_dim..(j + 1) * noise_dim];
                for (slot, zk) in row.iter_mut().zip(zi) {
                    *slot += u * zk;
                }
                db[j] += u;
            }
        }
        Ok(grads)
    }

    pub fn param_count(&self) -> usize {
        self.weight.rows() * self.weight.cols() + self.bias.len()
    }

    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = self.weight.data().to_vec();
        out.extend_from_slice(&self.bias);
        out
    }

    pub fn set_params_flat(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(GeneratorError::ShapeMismatch {
                want: self.param_count(),
                got: params.len(),
            });
        }
        let nw = self.weight.rows() * self.weight.cols();
        self.weight =
            DenseMatrix::from_vec(self.weight.rows(), self.weight.cols(), params[..nw].to_vec())
                .map_err(|_| GeneratorError::ShapeMismatch { want: nw, got: nw })?;
        self.bias.copy_from_slice(&params[nw..]);
        Ok(())
    }

    pub(super) fn document(&self) -> CheckpointDoc {
        CheckpointDoc::Affine {
            out_dim: self.out_dim(),
            noise_dim: self.noise_dim(),
            weight: self.weight.data().to_vec(),
            bias: self.bias.clone(),
        }
    }

    pub(super) fn from_document(doc: CheckpointDoc) -> Result<Self> {
        match doc {
            CheckpointDoc::Affine { out_dim, noise_dim, weight, bias } => {
                if weight.len() != out_dim * noise_dim || bias.len() != out_dim {
                    return Err(GeneratorError::Checkpoint("array lengths inconsistent".into()));
                }
                let weight = DenseMatrix::from_vec(out_dim, noise_dim, weight)
                    .map_err(|e| GeneratorError::Checkpoint(e.to_string()))?;
                Ok(Self { weight, bias, cache: None })
            }
            _ => Err(GeneratorError::Checkpoint("expected an affine checkpoint".into())),
        }
    }
}
