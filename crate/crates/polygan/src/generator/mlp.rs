use serde::{Deserialize, Serialize};

use super::{CheckpointDoc, GeneratorError, Result};
use crate::numerics::{DenseMatrix, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    /// Slope 0.2 on the negative side.
    LeakyRelu,
}

impl Activation {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu => {
                if x > 0.0 {
                    x
                } else {
                    0.2 * x
                }
            }
        }
    }

    /// Subgradient at zero is taken as zero for ReLU (0.2 for leaky).
    #[inline]
    fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.2
                }
            }
        }
    }
}

/// Dense feedforward generator. Hidden layers use the configured activation,
/// the output layer is linear. Weights are He-uniform by fan-in, biases zero.
#[derive(Debug, Clone)]
pub struct MlpGenerator {
    sizes: Vec<usize>,
    weights: Vec<DenseMatrix>, // layer l: sizes[l+1] x sizes[l]
    biases: Vec<Vec<f64>>,
    activation: Activation,
    cache: Option<Cache>,
}

#[derive(Debug, Clone)]
struct Cache {
    input: DenseMatrix,
    pre_activations: Vec<DenseMatrix>,
    activations: Vec<DenseMatrix>,
}

impl MlpGenerator {
    pub fn new(sizes: &[usize], activation: Activation, rng: &mut SeededRng) -> Self {
        assert!(sizes.len() >= 2, "need at least input and output sizes");
        assert!(sizes.iter().all(|&s| s > 0));
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..sizes.len() - 1 {
            let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
            let limit = (6.0 / fan_in as f64).sqrt();
            let mut w = DenseMatrix::zeros(fan_out, fan_in);
            for i in 0..fan_out {
                for j in 0..fan_in {
                    w[(i, j)] = limit * (2.0 * rng.next_f64() - 1.0);
                }
            }
            weights.push(w);
            biases.push(vec![0.0; fan_out]);
        }
        Self { sizes: sizes.to_vec(), weights, biases, activation, cache: None }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn noise_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn out_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    fn layer_count(&self) -> usize {
        self.weights.len()
    }

    pub fn forward(&mut self, z: &DenseMatrix) -> Result<DenseMatrix> {
        let (pre, act) = self.run_forward(z)?;
        let out = act.last().unwrap().clone();
        self.cache = Some(Cache { input: z.clone(), pre_activations: pre, activations: act });
        Ok(out)
    }

    pub fn forward_inference(&self, z: &DenseMatrix) -> Result<DenseMatrix> {
        let (_, mut act) = self.run_forward(z)?;
        Ok(act.pop().unwrap())
    }

    #[allow(clippy::type_complexity)]
    fn run_forward(&self, z: &DenseMatrix) -> Result<(Vec<DenseMatrix>, Vec<DenseMatrix>)> {
        if z.cols() != self.noise_dim() {
            return Err(GeneratorError::ShapeMismatch { want: self.noise_dim(), got: z.cols() });
        }
        let batch = z.rows();
        let layers = self.layer_count();
        let mut pre = Vec::with_capacity(layers);
        let mut act = Vec::with_capacity(layers);
        let mut current = z;
        for l in 0..layers {
            let out_dim = self.sizes[l + 1];
            let w = &self.weights[l];
            let b = &self.biases[l];
            let mut zl = DenseMatrix::zeros(batch, out_dim);
            for i in 0..batch {
                let input = current.row(i);
                let row = zl.row_mut(i);
                for (j, slot) in row.iter_mut().enumerate() {
                    let mut acc = b[j];
                    for (wk, xk) in w.row(j).iter().zip(input) {
                        acc += wk * xk;
                    }
                    *slot = acc;
                }
            }
            let al = if l + 1 == layers {
                zl.clone()
            } else {
                let mut a = zl.clone();
                for i in 0..batch {
                    for v in a.row_mut(i) {
                        *v = self.activation.apply(*v);
                    }
                }
                a
            };
            pre.push(zl);
            act.push(al);
            current = act.last().unwrap();
        }
        Ok((pre, act))
    }

    /// Chain `upstream = dL/d(output)` back to flat parameter gradients.
    pub fn backward(&mut self, upstream: &DenseMatrix) -> Result<Vec<f64>> {
        let cache = self.cache.as_ref().ok_or(GeneratorError::StaleCache {
            cached: None,
            got: upstream.rows(),
        })?;
        let batch = cache.input.rows();
        if upstream.rows() != batch || upstream.cols() != self.out_dim() {
            return Err(GeneratorError::StaleCache { cached: Some(batch), got: upstream.rows() });
        }

        let layers = self.layer_count();
        let mut grads = vec![0.0; self.param_count()];
        let offsets = self.param_offsets();

        let mut delta = upstream.clone(); // dL/dZ_l, starting at the linear output
        for l in (0..layers).rev() {
            let input = if l == 0 { &cache.input } else { &cache.activations[l - 1] };
            let (in_dim, out_dim) = (self.sizes[l], self.sizes[l + 1]);
            let (w_off, b_off) = offsets[l];
            {
                let (dw, rest) = grads[w_off..].split_at_mut(out_dim * in_dim);
                let db = &mut rest[..out_dim];
                debug_assert_eq!(w_off + out_dim * in_dim, b_off);
                for i in 0..batch {
                    let d = delta.row(i);
                    let x = input.row(i);
                    for (j, &dj) in d.iter().enumerate() {
                        if dj == 0.0 {
                            continue;
                        }
                        let row = &mut dw[j * in_dim..(j + 1) * in_dim];
                        for (slot, xk) in row.iter_mut().zip(x) {
                            *slot += dj * xk;
                        }
                        db[j] += dj;
                    }
                }
            }
            if l == 0 {
                break;
            }
            // dL/dA_{l-1} = delta W_l, then through the activation.
            let w = &self.weights[l];
            let prev_pre = &cache.pre_activations[l - 1];
            let mut next_delta = DenseMatrix::zeros(batch, in_dim);
            for i in 0..batch {
                let d = delta.row(i);
                let nd = next_delta.row_mut(i);
                for (j, &dj) in d.iter().enumerate() {
                    if dj == 0.0 {
                        continue;
                    }
                    for (slot, wk) in nd.iter_mut().zip(w.row(j)) {
                        *slot += dj * wk;
                    }
                }
                let pre_row = prev_pre.row(i);
                for (slot, &p) in nd.iter_mut().zip(pre_row) {
                    *slot *= self.activation.derivative(p);
                }
            }
            delta = next_delta;
        }
        Ok(grads)
    }

    fn param_offsets(&self) -> Vec<(usize, usize)> {
        let mut offsets = Vec::with_capacity(self.layer_count());
        let mut cursor = 0;
        for l in 0..self.layer_count() {
            let nw = self.sizes[l + 1] * self.sizes[l];
            offsets.push((cursor, cursor + nw));
            cursor += nw + self.sizes[l + 1];
        }
        offsets
    }

    pub fn param_count(&self) -> usize {
        (0..self.layer_count()).map(|l| self.sizes[l + 1] * (self.sizes[l] + 1)).sum()
    }

    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w.data());
            out.extend_from_slice(b);
        }
        out
    }

    pub fn set_params_flat(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(GeneratorError::ShapeMismatch {
                want: self.param_count(),
                got: params.len(),
            });
        }
        let mut cursor = 0;
        for l in 0..self.layer_count() {
            let (rows, cols) = (self.sizes[l + 1], self.sizes[l]);
            let nw = rows * cols;
            self.weights[l] = DenseMatrix::from_vec(rows, cols, params[cursor..cursor + nw].to_vec())
                .map_err(|e| GeneratorError::Checkpoint(e.to_string()))?;
            cursor += nw;
            self.biases[l].copy_from_slice(&params[cursor..cursor + rows]);
            cursor += rows;
        }
        Ok(())
    }

    pub(super) fn document(&self) -> CheckpointDoc {
        CheckpointDoc::Mlp {
            sizes: self.sizes.clone(),
            activation: self.activation,
            weights: self.weights.iter().map(|w| w.data().to_vec()).collect(),
            biases: self.biases.clone(),
        }
    }

    pub(super) fn from_document(doc: CheckpointDoc) -> Result<Self> {
        match doc {
            CheckpointDoc::Mlp { sizes, activation, weights, biases } => {
                if sizes.len() < 2 || weights.len() != sizes.len() - 1 || biases.len() != weights.len()
                {
                    return Err(GeneratorError::Checkpoint("layer counts inconsistent".into()));
                }
                let mut ws = Vec::new();
                for (l, data) in weights.into_iter().enumerate() {
                    if data.len() != sizes[l + 1] * sizes[l] || biases[l].len() != sizes[l + 1] {
                        return Err(GeneratorError::Checkpoint("array lengths inconsistent".into()));
                    }
                    ws.push(
                        DenseMatrix::from_vec(sizes[l + 1], sizes[l], data)
                            .map_err(|e| GeneratorError::Checkpoint(e.to_string()))?,
                    );
                }
                Ok(Self { sizes, weights: ws, biases, activation, cache: None })
            }
            _ => Err(GeneratorError::Checkpoint("expected an mlp checkpoint".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite_difference_check(sizes: &[usize], activation: Activation, seed: u64) {
        let mut rng = SeededRng::new(seed);
        let mut gen = MlpGenerator::new(sizes, activation, &mut rng);
        let batch = 4;
        let mut z = DenseMatrix::zeros(batch, sizes[0]);
        for i in 0..batch {
            // Jitter keeps pre-activations away from the ReLU kink.
            for v in z.row_mut(i) {
                *v = rng.next_standard_normal() + 0.01;
            }
        }
        let mut upstream = DenseMatrix::zeros(batch, *sizes.last().unwrap());
        for i in 0..batch {
            for v in upstream.row_mut(i) {
                *v = rng.next_standard_normal();
            }
        }
        gen.forward(&z).unwrap();
        let analytic = gen.backward(&upstream).unwrap();

        // Scalar objective L = sum_ij upstream[i][j] * out[i][j].
        let loss = |g: &MlpGenerator| -> f64 {
            let out = g.forward_inference(&z).unwrap();
            out.data().iter().zip(upstream.data()).map(|(a, b)| a * b).sum()
        };
        let params = gen.params_flat();
        let h = 1e-5;
        let mut worst = 0.0f64;
        for p in 0..params.len() {
            let mut plus = params.clone();
            let mut minus = params.clone();
            plus[p] += h;
            minus[p] -= h;
            let mut gp = gen.clone();
            gp.set_params_flat(&plus).unwrap();
            let mut gm = gen.clone();
            gm.set_params_flat(&minus).unwrap();
            let fd = (loss(&gp) - loss(&gm)) / (2.0 * h);
            let scale = analytic[p].abs().max(fd.abs()).max(1e-6);
            worst = worst.max((analytic[p] - fd).abs() / scale);
        }
        assert!(worst < 1e-4, "sizes {sizes:?}: worst relative error {worst}");
    }

    #[test]
    fn backward_matches_finite_differences_three_layers() {
        finite_difference_check(&[3, 5, 4, 2], Activation::LeakyRelu, 21);
        finite_difference_check(&[2, 6, 3], Activation::Relu, 22);
    }

    #[test]
    fn zero_weights_output_final_bias() {
        let mut rng = SeededRng::new(1);
        let mut gen = MlpGenerator::new(&[3, 4, 2], Activation::Relu, &mut rng);
        let mut params = vec![0.0; gen.param_count()];
        // Final bias lives in the last two slots.
        let n = params.len();
        params[n - 2] = 0.7;
        params[n - 1] = -0.3;
        gen.set_params_flat(&params).unwrap();
        let z = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![-1.0, 0.0, 4.0]]).unwrap();
        let out = gen.forward(&z).unwrap();
        for i in 0..2 {
            assert_eq!(out.row(i), &[0.7, -0.3]);
        }
    }

    #[test]
    fn leaky_net_is_positively_homogeneous() {
        // With zero biases, piecewise-linear activations commute with
        // positive scaling: G(t z) = t G(z).
        let mut rng = SeededRng::new(5);
        let gen = MlpGenerator::new(&[2, 8, 8, 2], Activation::LeakyRelu, &mut rng);
        let z = DenseMatrix::from_rows(&[vec![0.42, -1.3]]).unwrap();
        let tz = DenseMatrix::from_rows(&[vec![0.42 * 2.5, -1.3 * 2.5]]).unwrap();
        let a = gen.forward_inference(&z).unwrap();
        let b = gen.forward_inference(&tz).unwrap();
        for (ai, bi) in a.data().iter().zip(b.data()) {
            assert!((2.5 * ai - bi).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_finite_on_finite_input() {
        let mut rng = SeededRng::new(9);
        let gen = MlpGenerator::new(&[4, 16, 8, 3], Activation::LeakyRelu, &mut rng);
        let mut z = DenseMatrix::zeros(10, 4);
        for i in 0..10 {
            for v in z.row_mut(i) {
                *v = 100.0 * rng.next_standard_normal();
            }
        }
        let out = gen.forward_inference(&z).unwrap();
        assert!(out.data().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn stale_cache_detected_on_batch_mismatch() {
        let mut rng = SeededRng::new(2);
        let mut gen = MlpGenerator::new(&[2, 3, 2], Activation::Relu, &mut rng);
        let z = DenseMatrix::zeros(4, 2);
        gen.forward(&z).unwrap();
        let r = gen.backward(&DenseMatrix::zeros(3, 2));
        assert!(matches!(r, Err(GeneratorError::StaleCache { cached: Some(4), got: 3 })));
    }

    #[test]
    fn checkpoint_roundtrip() {
        let mut rng = SeededRng::new(88);
        let gen = MlpGenerator::new(&[3, 5, 2], Activation::LeakyRelu, &mut rng);
        let g = super::super::Generator::Mlp(gen);
        let text = g.to_json();
        let g2 = super::super::Generator::from_json(&text).unwrap();
        let z = DenseMatrix::from_rows(&[vec![0.1, -0.5, 0.8]]).unwrap();
        let a = g.forward_inference(&z).unwrap();
        let b = g2.forward_inference(&z).unwrap();
        assert_eq!(a.data(), b.data());
    }
}
