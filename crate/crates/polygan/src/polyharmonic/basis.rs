use super::{binomial, enumerate_multi_indices, MultiIndex, PolyharmonicError, Result};

/// Monomial basis of all polynomials of degree `<= m - 1` over `R^n`, the
/// null space of the order-`m` gradient penalty.
///
/// Terms are in graded lexicographic order (constant first, leading variable
/// largest within each grade). The order is frozen; coefficient vectors `v`
/// are stored and serialized against it.
#[derive(Debug, Clone)]
pub struct PolyBasis {
    n: usize,
    degree: u32,
    terms: Vec<MultiIndex>,
}

impl PolyBasis {
    /// Basis for gradient order `m` in dimension `n` (degree `m - 1`).
    pub fn new(n: usize, m: u32) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(PolyharmonicError::InvalidParams { m, n: n as u32 });
        }
        let degree = m - 1;
        let mut terms = Vec::new();
        for order in 0..=degree {
            terms.extend(enumerate_multi_indices(n, order)?);
        }
        Ok(Self { n, degree, terms })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of basis terms, `C(n + m - 1, m - 1)`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[MultiIndex] {
        &self.terms
    }

    /// Expected term count from the binomial formula.
    pub fn expected_len(n: usize, m: u32) -> Option<u64> {
        binomial((n as u64) + u64::from(m) - 1, u64::from(m) - 1)
    }

    /// Evaluate every monomial at `x`; the first entry is always 1.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(x, &mut out);
        out
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.len());
        for (slot, term) in out.iter_mut().zip(&self.terms) {
            let mut acc = 1.0;
            for (xi, &e) in x.iter().zip(term.entries()) {
                if e > 0 {
                    acc *= xi.powi(e as i32);
                }
            }
            *slot = acc;
        }
    }

    /// Accumulate `grad (sum_j coeffs[j] * term_j)(x)` into `out`.
    pub fn gradient_combination(&self, x: &[f64], coeffs: &[f64], out: &mut [f64]) {
        debug_assert_eq!(coeffs.len(), self.len());
        debug_assert_eq!(out.len(), self.n);
        for (term, &v) in self.terms.iter().zip(coeffs) {
            if v == 0.0 {
                continue;
            }
            for d in 0..self.n {
                let e_d = term.entries()[d];
                if e_d == 0 {
                    continue;
                }
                let mut acc = e_d as f64;
                for (j, (&e, xj)) in term.entries().iter().zip(x).enumerate() {
                    let power = if j == d { e - 1 } else { e };
                    if power > 0 {
                        acc *= xj.powi(power as i32);
                    }
                }
                out[d] += v * acc;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_basis_in_two_dims() {
        // m=2: degree-1 basis {1, x1, x2} at (2, 3).
        let b = PolyBasis::new(2, 2).unwrap();
        assert_eq!(b.eval(&[2.0, 3.0]), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn quadratic_basis_in_two_dims() {
        // m=3: {1, x1, x2, x1^2, x1 x2, x2^2} at (2, 3).
        let b = PolyBasis::new(2, 3).unwrap();
        assert_eq!(b.eval(&[2.0, 3.0]), vec![1.0, 2.0, 3.0, 4.0, 6.0, 9.0]);
    }

    #[test]
    fn first_order_penalty_has_constant_basis() {
        for n in 1..=4usize {
            let b = PolyBasis::new(n, 1).unwrap();
            assert_eq!(b.len(), 1);
            assert_eq!(b.eval(&vec![0.7; n]), vec![1.0]);
        }
    }

    #[test]
    fn term_count_matches_binomial() {
        for n in 1..=8usize {
            for m in 1..=5u32 {
                let b = PolyBasis::new(n, m).unwrap();
                assert_eq!(
                    b.len() as u64,
                    PolyBasis::expected_len(n, m).unwrap(),
                    "n={n} m={m}"
                );
            }
        }
    }

    #[test]
    fn gradient_combination_matches_finite_differences() {
        let b = PolyBasis::new(3, 4).unwrap();
        let mut rng = crate::numerics::SeededRng::new(99);
        let coeffs: Vec<f64> = (0..b.len()).map(|_| rng.next_standard_normal()).collect();
        let x = [0.4, -1.2, 0.9];
        let mut grad = vec![0.0; 3];
        b.gradient_combination(&x, &coeffs, &mut grad);

        let f = |p: &[f64]| -> f64 {
            b.eval(p).iter().zip(&coeffs).map(|(t, c)| t * c).sum()
        };
        let h = 1e-6;
        for d in 0..3 {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[d] += h;
            xm[d] -= h;
            let fd = (f(&xp) - f(&xm)) / (2.0 * h);
            assert!((grad[d] - fd).abs() < 1e-6 * fd.abs().max(1.0));
        }
    }
}
