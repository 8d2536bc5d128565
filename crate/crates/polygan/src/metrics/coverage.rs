use crate::numerics::DenseMatrix;

/// Fraction of samples within `radius` of each mode mean. Each sample is
/// credited to its nearest mode only, so the fractions sum to at most 1.
pub fn mode_coverage(samples: &DenseMatrix, modes: &[Vec<f64>], radius: f64) -> Vec<f64> {
    assert!(radius > 0.0, "radius must be positive");
    let mut counts = vec![0usize; modes.len()];
    if samples.rows() == 0 || modes.is_empty() {
        return vec![0.0; modes.len()];
    }
    for i in 0..samples.rows() {
        let x = samples.row(i);
        let mut best = 0usize;
        let mut best_d2 = f64::INFINITY;
        for (k, mode) in modes.iter().enumerate() {
            let d2: f64 = x.iter().zip(mode).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 < best_d2 {
                best_d2 = d2;
                best = k;
            }
        }
        if best_d2 <= radius * radius {
            counts[best] += 1;
        }
    }
    counts.iter().map(|&c| c as f64 / samples.rows() as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{sample_gaussian, SeededRng, SpdMatrix};

    fn circle_modes(count: usize) -> Vec<Vec<f64>> {
        (0..count)
            .map(|j| {
                let angle = std::f64::consts::TAU * j as f64 / count as f64;
                vec![angle.cos(), angle.sin()]
            })
            .collect()
    }

    #[test]
    fn all_samples_at_first_mode() {
        let modes = circle_modes(8);
        let rows: Vec<Vec<f64>> = (0..50).map(|_| modes[0].clone()).collect();
        let samples = DenseMatrix::from_rows(&rows).unwrap();
        let cov = mode_coverage(&samples, &modes, 0.1);
        assert_eq!(cov[0], 1.0);
        assert!(cov[1..].iter().all(|&f| f == 0.0));
    }

    #[test]
    fn uniform_on_mode_means() {
        let modes = circle_modes(8);
        let mut rows = Vec::new();
        for _ in 0..10 {
            rows.extend(modes.iter().cloned());
        }
        let samples = DenseMatrix::from_rows(&rows).unwrap();
        let cov = mode_coverage(&samples, &modes, 0.1);
        for f in cov {
            assert!((f - 0.125).abs() < 1e-12);
        }
        // Fractions sum to one here, never more.
    }

    #[test]
    fn tight_cluster_fully_captured() {
        // N(mode, 0.02^2 I) vs radius 0.1 = 5 sigma: essentially everything
        // lands inside (chi-square tail is ~ 4e-6).
        let modes = circle_modes(8);
        let cov_mat = SpdMatrix::scaled_identity(2, 0.02 * 0.02).unwrap();
        let mut rng = SeededRng::new(9);
        let samples = sample_gaussian(&mut rng, &modes[3], &cov_mat, 20_000).unwrap();
        let cov = mode_coverage(&samples, &modes, 0.1);
        assert!(cov[3] > 0.999, "captured fraction {}", cov[3]);
    }
}
