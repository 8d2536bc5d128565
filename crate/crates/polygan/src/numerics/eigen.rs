use super::{DenseMatrix, NumericsError, Result, SpdMatrix};

const MAX_SWEEPS: usize = 100;
const EIGEN_CLAMP: f64 = -1e-10;

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matrix whose columns are
/// the corresponding orthonormal eigenvectors, so `S = V diag(l) V^T`.
pub fn sym_eigen(s: &SpdMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    jacobi_eigen(s.as_matrix())
}

/// Jacobi iteration on the raw symmetric matrix. `SpdMatrix::new` calls this
/// before the PSD check, hence the split from the public wrapper.
pub(crate) fn jacobi_eigen(mat: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    let n = mat.rows();
    let mut a = mat.clone();
    let mut v = DenseMatrix::identity(n);
    if n <= 1 {
        let vals = (0..n).map(|i| a[(i, i)]).collect();
        return Ok((vals, v));
    }

    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let tol = 1e-14 * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a[(i, j)].abs());
            }
        }
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                // Classic Jacobi rotation annihilating a[p][q].
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(NumericsError::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, new_col)] = v[(row, old_col)];
        }
    }
    Ok((values, vectors))
}

/// Symmetric PSD square root via eigendecomposition: `R R = S`.
///
/// Eigenvalues in `[-1e-10, 0)` are clamped to zero; anything more negative
/// is an error.
pub fn spd_sqrt(s: &SpdMatrix) -> Result<SpdMatrix> {
    let n = s.dim();
    let (values, vectors) = sym_eigen(s)?;
    let mut roots = Vec::with_capacity(n);
    for &l in &values {
        if l < EIGEN_CLAMP {
            return Err(NumericsError::NegativeEigenvalue(l));
        }
        roots.push(l.max(0.0).sqrt());
    }
    // R = V sqrt(L) V^T, symmetrized against rounding.
    let mut r = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut sum = 0.0;
            for k in 0..n {
                sum += vectors[(i, k)] * roots[k] * vectors[(j, k)];
            }
            r[(i, j)] = sum;
            r[(j, i)] = sum;
        }
    }
    SpdMatrix::new(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(rows: &[Vec<f64>]) -> SpdMatrix {
        SpdMatrix::new(DenseMatrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn diagonal_eigenvalues_sorted_descending() {
        let s = spd(&[vec![4.0, 0.0], vec![0.0, 9.0]]);
        let (vals, _) = sym_eigen(&s).unwrap();
        assert_eq!(vals, vec![9.0, 4.0]);
    }

    #[test]
    fn identity_eigenvalues() {
        let s = spd(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let (vals, _) = sym_eigen(&s).unwrap();
        assert_eq!(vals, vec![1.0, 1.0]);
    }

    #[test]
    fn two_by_two_characteristic_roots() {
        // [[2,1],[1,2]]: det(lI - A) = l^2 - 4l + 3 = (l-3)(l-1).
        let s = spd(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let (vals, vecs) = sym_eigen(&s).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-10);
        assert!((vals[1] - 1.0).abs() < 1e-10);
        // Reconstruction S = V L V^T.
        for i in 0..2 {
            for j in 0..2 {
                let mut sum = 0.0;
                for k in 0..2 {
                    sum += vecs[(i, k)] * vals[k] * vecs[(j, k)];
                }
                assert!((sum - s.as_matrix()[(i, j)]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn sqrt_of_diagonal() {
        let s = spd(&[vec![4.0, 0.0], vec![0.0, 9.0]]);
        let r = spd_sqrt(&s).unwrap();
        assert!((r.as_matrix()[(0, 0)] - 2.0).abs() < 1e-12);
        assert!((r.as_matrix()[(1, 1)] - 3.0).abs() < 1e-12);
        assert!(r.as_matrix()[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn sqrt_of_identity() {
        let s = SpdMatrix::scaled_identity(5, 1.0).unwrap();
        let r = spd_sqrt(&s).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((r.as_matrix()[(i, j)] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sqrt_squares_back() {
        // [[2,1],[1,2]] -> V diag(sqrt(3),1) V^T.
        let s = spd(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let r = spd_sqrt(&s).unwrap();
        let rr = r.as_matrix().matmul(r.as_matrix());
        for i in 0..2 {
            for j in 0..2 {
                assert!((rr[(i, j)] - s.as_matrix()[(i, j)]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn random_spd_roundtrip_and_trace() {
        let mut rng = crate::numerics::SeededRng::new(11);
        for _ in 0..10 {
            let n = 2 + (rng.next_u64() % 16) as usize;
            let mut g = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    g[(i, j)] = rng.next_standard_normal();
                }
            }
            // G G^T is PSD by construction.
            let ggt = g.matmul(&g.transpose());
            let s = SpdMatrix::new(ggt).unwrap();
            let (vals, _) = sym_eigen(&s).unwrap();
            let sum: f64 = vals.iter().sum();
            assert!((sum - s.trace()).abs() <= 1e-8 * s.trace().abs().max(1.0));

            let r = spd_sqrt(&s).unwrap();
            let rr = r.as_matrix().matmul(r.as_matrix());
            let scale = s.as_matrix().max_abs().max(1.0);
            for i in 0..n {
                for j in 0..n {
                    assert!(
                        (rr[(i, j)] - s.as_matrix()[(i, j)]).abs() <= 1e-7 * scale,
                        "sqrt roundtrip failed at n={n}"
                    );
                }
            }
        }
    }
}
