use super::{spd_sqrt, DenseMatrix, Result, SpdMatrix};

/// Counter-based pseudo-random generator (SplitMix64).
///
/// The state is a single 64-bit counter advanced by a fixed increment and
/// hashed to produce each output, so identical seeds give identical streams
/// on every platform. Gaussian variates come from Box-Muller with the spare
/// value cached.
#[derive(Debug, Clone)]
pub struct SeededRng {
    state: u64,
    spare_normal: Option<f64>,
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed, spare_normal: None }
    }

    /// Independent stream derived from this generator's seed and a label.
    /// Used to give sweeps and metric evaluation their own streams.
    pub fn derive(seed: u64, stream: u64) -> Self {
        let mut mix = Self::new(seed ^ stream.wrapping_mul(GOLDEN_GAMMA));
        mix.next_u64();
        mix
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1]; safe as a logarithm argument.
    fn next_f64_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn next_standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.next_f64_open();
        let u2 = self.next_f64();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }

    /// Uniform integer in [0, bound).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        // Multiply-shift bounded sampling; bias is ~bound/2^64, negligible here.
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    pub fn fill_standard_normal(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.next_standard_normal();
        }
    }
}

/// Multivariate Gaussian sampler with the covariance square root factored once.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    mean: Vec<f64>,
    sqrt_cov: DenseMatrix,
}

impl GaussianSampler {
    pub fn new(mean: Vec<f64>, cov: &SpdMatrix) -> Result<Self> {
        assert_eq!(mean.len(), cov.dim(), "mean and covariance dimension mismatch");
        let sqrt_cov = spd_sqrt(cov)?.as_matrix().clone();
        Ok(Self { mean, sqrt_cov })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Draw `count` i.i.d. rows into an `count x n` matrix.
    pub fn sample(&self, rng: &mut SeededRng, count: usize) -> DenseMatrix {
        let n = self.dim();
        let mut out = DenseMatrix::zeros(count, n);
        let mut z = vec![0.0; n];
        for i in 0..count {
            rng.fill_standard_normal(&mut z);
            let row = out.row_mut(i);
            for (j, row_j) in row.iter_mut().enumerate() {
                let mut acc = self.mean[j];
                let l_row = self.sqrt_cov.row(j);
                for (l, zk) in l_row.iter().zip(&z) {
                    acc += l * zk;
                }
                *row_j = acc;
            }
        }
        out
    }
}

/// Draw `count` i.i.d. samples from `N(mean, cov)`, returned as rows.
pub fn sample_gaussian(
    rng: &mut SeededRng,
    mean: &[f64],
    cov: &SpdMatrix,
    count: usize,
) -> Result<DenseMatrix> {
    Ok(GaussianSampler::new(mean.to_vec(), cov)?.sample(rng, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SeededRng::new(42);
        let mut b = SeededRng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut a = SeededRng::new(42);
        let mut b = SeededRng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_standard_normal().to_bits(), b.next_standard_normal().to_bits());
        }
    }

    #[test]
    fn derived_streams_differ() {
        let mut a = SeededRng::derive(42, 1);
        let mut b = SeededRng::derive(42, 2);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn zero_covariance_returns_mean() {
        let cov = SpdMatrix::scaled_identity(2, 0.0).unwrap();
        let mut rng = SeededRng::new(3);
        let s = sample_gaussian(&mut rng, &[1.5, -2.0], &cov, 4).unwrap();
        for i in 0..4 {
            assert_eq!(s.row(i), &[1.5, -2.0]);
        }
    }

    #[test]
    fn deterministic_sampling() {
        let cov = SpdMatrix::scaled_identity(2, 1.0).unwrap();
        let a = sample_gaussian(&mut SeededRng::new(9), &[0.0, 0.0], &cov, 16).unwrap();
        let b = sample_gaussian(&mut SeededRng::new(9), &[0.0, 0.0], &cov, 16).unwrap();
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn standard_normal_moments() {
        // CLT bound: 3 sigma / sqrt(N) ~ 0.0095 for N = 1e5; assert at 0.02.
        let cov = SpdMatrix::scaled_identity(2, 1.0).unwrap();
        let n = 100_000;
        let s = sample_gaussian(&mut SeededRng::new(1234), &[0.0, 0.0], &cov, n).unwrap();
        for j in 0..2 {
            let mean: f64 = (0..n).map(|i| s[(i, j)]).sum::<f64>() / n as f64;
            assert!(mean.abs() < 0.02, "coordinate {j} mean {mean}");
            let var: f64 = (0..n).map(|i| (s[(i, j)] - mean).powi(2)).sum::<f64>() / n as f64;
            assert!((var - 1.0).abs() < 0.03, "coordinate {j} variance {var}");
        }
    }

    #[test]
    fn covariance_is_applied() {
        // N(0, [[2,1],[1,2]]): check sample covariance at loose tolerance.
        let cov = SpdMatrix::new(
            DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap(),
        )
        .unwrap();
        let n = 50_000;
        let s = sample_gaussian(&mut SeededRng::new(7), &[0.0, 0.0], &cov, n).unwrap();
        let mut c = [[0.0f64; 2]; 2];
        for i in 0..n {
            let r = s.row(i);
            for a in 0..2 {
                for b in 0..2 {
                    c[a][b] += r[a] * r[b];
                }
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                let got = c[a][b] / n as f64;
                let want = cov.as_matrix()[(a, b)];
                assert!((got - want).abs() < 0.1, "cov[{a}][{b}] = {got}, want {want}");
            }
        }
    }
}
