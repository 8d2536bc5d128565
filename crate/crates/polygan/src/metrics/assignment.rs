use super::{MetricsError, Result};
use crate::numerics::DenseMatrix;

/// Exact minimum-cost assignment on a square cost matrix via shortest
/// augmenting paths with potentials (O(n^3)). Returns the column assigned to
/// each row and the total cost.
pub fn min_cost_assignment(cost: &DenseMatrix) -> (Vec<usize>, f64) {
    let n = cost.rows();
    assert_eq!(n, cost.cols(), "cost matrix must be square");
    if n == 0 {
        return (Vec::new(), 0.0);
    }

    // 1-indexed potentials; p[j] is the row matched to column j, 0 = free.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            let row = cost.row(i0 - 1);
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = row[j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    let mut total = 0.0;
    for j in 1..=n {
        assignment[p[j] - 1] = j - 1;
        total += cost[(p[j] - 1, j - 1)];
    }
    (assignment, total)
}

/// Empirical squared Wasserstein-2 distance between two equally sized sample
/// sets: the exact assignment minimum of mean squared Euclidean cost.
pub fn w22_empirical(x: &DenseMatrix, y: &DenseMatrix) -> Result<f64> {
    if x.rows() != y.rows() {
        return Err(MetricsError::SizeMismatch { x: x.rows(), y: y.rows() });
    }
    if x.cols() != y.cols() {
        return Err(MetricsError::DimensionMismatch { x: x.cols(), y: y.cols() });
    }
    let n = x.rows();
    if n == 0 {
        return Err(MetricsError::EmptySamples);
    }
    let mut cost = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let xi = x.row(i);
        let row = cost.row_mut(i);
        for (j, slot) in row.iter_mut().enumerate() {
            let mut d2 = 0.0;
            for (a, b) in xi.iter().zip(y.row(j)) {
                let d = a - b;
                d2 += d * d;
            }
            *slot = d2;
        }
    }
    let (_, total) = min_cost_assignment(&cost);
    Ok(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SeededRng;

    fn brute_force_min(cost: &DenseMatrix) -> f64 {
        let n = cost.rows();
        let mut cols: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        permute(&mut cols, 0, cost, &mut best);
        best
    }

    fn permute(cols: &mut Vec<usize>, k: usize, cost: &DenseMatrix, best: &mut f64) {
        let n = cols.len();
        if k == n {
            let total: f64 = (0..n).map(|i| cost[(i, cols[i])]).sum();
            if total < *best {
                *best = total;
            }
            return;
        }
        for i in k..n {
            cols.swap(k, i);
            permute(cols, k + 1, cost, best);
            cols.swap(k, i);
        }
    }

    #[test]
    fn singleton_pair() {
        let x = DenseMatrix::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let y = DenseMatrix::from_rows(&[vec![3.0, 4.0]]).unwrap();
        assert_eq!(w22_empirical(&x, &y).unwrap(), 25.0);
    }

    #[test]
    fn permutation_of_itself_is_zero() {
        let x = DenseMatrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let y = DenseMatrix::from_rows(&[vec![3.0], vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(w22_empirical(&x, &y).unwrap(), 0.0);
    }

    #[test]
    fn crossing_pairs_in_one_dimension() {
        // X = {0, 1}, Y = {1, 2}: identity pairing costs (1+1)/2 = 1,
        // the swap costs (4+0)/2 = 2.
        let x = DenseMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let y = DenseMatrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(w22_empirical(&x, &y).unwrap(), 1.0);
    }

    #[test]
    fn matches_brute_force_up_to_seven() {
        let mut rng = SeededRng::new(314);
        for n in 1..=7usize {
            for _ in 0..20 {
                let mut cost = DenseMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        cost[(i, j)] = rng.next_f64() * 10.0;
                    }
                }
                let (assignment, total) = min_cost_assignment(&cost);
                // Assignment is a permutation.
                let mut seen = vec![false; n];
                for &c in &assignment {
                    assert!(!seen[c]);
                    seen[c] = true;
                }
                let brute = brute_force_min(&cost);
                assert!(
                    (total - brute).abs() < 1e-9,
                    "n={n}: exact {total} vs brute {brute}"
                );
            }
        }
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let x = DenseMatrix::zeros(3, 2);
        let y = DenseMatrix::zeros(4, 2);
        assert!(matches!(
            w22_empirical(&x, &y),
            Err(MetricsError::SizeMismatch { x: 3, y: 4 })
        ));
    }

    #[test]
    fn gaussian_samples_approach_closed_form() {
        // Moderate-size sanity check; the full N=2000 comparison runs in the
        // acceptance suite.
        use crate::metrics::{w22_gaussian, GaussianMoments};
        use crate::numerics::{sample_gaussian, SpdMatrix};
        let p_mean = vec![0.0, 0.0];
        let q_mean = vec![2.5, -1.0];
        let p_cov = SpdMatrix::scaled_identity(2, 1.0).unwrap();
        let q_cov = SpdMatrix::scaled_identity(2, 2.0).unwrap();
        let p = GaussianMoments::new(p_mean.clone(), p_cov.clone()).unwrap();
        let q = GaussianMoments::new(q_mean.clone(), q_cov.clone()).unwrap();
        let closed = w22_gaussian(&p, &q).unwrap();

        let mut rng = SeededRng::new(77);
        let xs = sample_gaussian(&mut rng, &p_mean, &p_cov, 600).unwrap();
        let ys = sample_gaussian(&mut rng, &q_mean, &q_cov, 600).unwrap();
        let emp = w22_empirical(&xs, &ys).unwrap();
        assert!(
            (emp - closed).abs() / closed < 0.15,
            "empirical {emp} vs closed {closed}"
        );
    }
}
