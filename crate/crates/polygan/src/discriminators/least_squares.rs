use serde::{Deserialize, Serialize};

use super::{DiscriminatorError, Result};
use crate::numerics::{DenseMatrix, LuDecomposition, NumericsError};
use crate::polyharmonic::{PolyBasis, PolyKernel};

/// Minimum pairwise center distance before the kernel matrix is declared
/// numerically singular.
const DUPLICATE_THRESHOLD: f64 = 1e-10;

const ENERGY_TOL: f64 = 1e-8;

/// Class labels for the least-squares coding scheme: fakes get `a`, reals
/// get `b`, and the generator is trained toward `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassLabels {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for ClassLabels {
    /// `a = -1`, `b = +1`, and `c = b` so the generator targets the real class.
    fn default() -> Self {
        Self { a: -1.0, b: 1.0, c: 1.0 }
    }
}

impl ClassLabels {
    pub fn validate(&self) -> Result<()> {
        if self.a == self.b {
            return Err(DiscriminatorError::Serialization(
                "class labels a and b must differ".into(),
            ));
        }
        Ok(())
    }
}

/// Least-squares spline discriminator: kernel expansion over the labelled
/// centers plus a polynomial from the penalty null space.
#[derive(Debug, Clone)]
pub struct LsRbfDiscriminator {
    kernel: PolyKernel,
    basis: PolyBasis,
    centers: DenseMatrix,
    labels: Vec<f64>,
    weights: Vec<f64>,
    poly_coeffs: Vec<f64>,
    lambda_d: f64,
    c_k: f64,
}

/// Fit the discriminator by solving the block system
///
/// ```text
/// [ A + (-1)^m lambda_d c_k I   B ] [w]   [y]
/// [ B^T                         0 ] [v] = [0]
/// ```
///
/// with `A[i][j] = psi(|c_i - c_j|)` and `B[i] = ` monomials of `c_i` up to
/// degree `m - 1`. Requires exponent `2m - n > 0`, pairwise distinct centers
/// in general position, and at least as many centers as polynomial terms.
pub fn fit_ls_discriminator(
    kernel: PolyKernel,
    centers: DenseMatrix,
    labels: Vec<f64>,
    lambda_d: f64,
    c_k: f64,
) -> Result<LsRbfDiscriminator> {
    if kernel.exponent() <= 0 {
        return Err(DiscriminatorError::InvalidOrder { k: kernel.exponent() });
    }
    let n_centers = centers.rows();
    let dim = kernel.dim();
    if centers.cols() != dim {
        return Err(DiscriminatorError::DimensionMismatch { want: dim, got: centers.cols() });
    }
    if labels.len() != n_centers {
        return Err(DiscriminatorError::DimensionMismatch { want: n_centers, got: labels.len() });
    }
    if n_centers == 0 {
        return Err(DiscriminatorError::EmptyBatch("interpolation"));
    }
    for i in 0..n_centers {
        for j in (i + 1)..n_centers {
            let d2: f64 = centers
                .row(i)
                .iter()
                .zip(centers.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d2 < DUPLICATE_THRESHOLD * DUPLICATE_THRESHOLD {
                return Err(DiscriminatorError::DuplicateCenters {
                    i,
                    j,
                    threshold: DUPLICATE_THRESHOLD,
                });
            }
        }
    }

    let basis = PolyBasis::new(dim, kernel.order())?;
    let n_poly = basis.len();
    if n_centers < n_poly {
        return Err(DiscriminatorError::InsufficientCenters { need: n_poly, got: n_centers });
    }

    let size = n_centers + n_poly;
    let mut system = DenseMatrix::zeros(size, size);
    let diag_shift = if kernel.order() % 2 == 0 { lambda_d * c_k } else { -lambda_d * c_k };
    for i in 0..n_centers {
        for j in i..n_centers {
            let r2: f64 = centers
                .row(i)
                .iter()
                .zip(centers.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let value = kernel.eval_r2(r2)?;
            system[(i, j)] = value;
            system[(j, i)] = value;
        }
        system[(i, i)] += diag_shift;
    }
    let mut row_buf = vec![0.0; n_poly];
    for i in 0..n_centers {
        basis.eval_into(centers.row(i), &mut row_buf);
        for (j, &value) in row_buf.iter().enumerate() {
            system[(i, n_centers + j)] = value;
            system[(n_centers + j, i)] = value;
        }
    }

    let mut rhs = vec![0.0; size];
    rhs[..n_centers].copy_from_slice(&labels);

    // Two refinement passes keep interpolation exact even when a batch
    // contains close center pairs and the kernel block is ill conditioned.
    let solution = LuDecomposition::decompose(&system)
        .and_then(|lu| lu.solve_refined(&system, &rhs, 2))
        .map_err(|e| match e {
            NumericsError::SingularMatrix { .. } => DiscriminatorError::RankDeficientB,
            other => DiscriminatorError::Numerics(other),
        })?;

    Ok(LsRbfDiscriminator {
        kernel,
        basis,
        centers,
        labels,
        weights: solution[..n_centers].to_vec(),
        poly_coeffs: solution[n_centers..].to_vec(),
        lambda_d,
        c_k,
    })
}

impl LsRbfDiscriminator {
    pub fn kernel(&self) -> &PolyKernel {
        &self.kernel
    }

    pub fn centers(&self) -> &DenseMatrix {
        &self.centers
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn poly_coeffs(&self) -> &[f64] {
        &self.poly_coeffs
    }

    pub fn lambda_d(&self) -> f64 {
        self.lambda_d
    }

    /// Discriminator value: kernel expansion plus the polynomial term.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.kernel.dim());
        let mut acc = 0.0;
        for (i, &w) in self.weights.iter().enumerate() {
            let r2: f64 = self
                .centers
                .row(i)
                .iter()
                .zip(x)
                .map(|(c, xi)| (xi - c) * (xi - c))
                .sum();
            // Exponent is positive by construction; eval cannot fail.
            acc += w * self.kernel.eval_r2(r2).expect("positive-order kernel");
        }
        let mut poly = vec![0.0; self.basis.len()];
        self.basis.eval_into(x, &mut poly);
        acc + poly.iter().zip(&self.poly_coeffs).map(|(t, v)| t * v).sum::<f64>()
    }

    /// Gradient of `eval` with respect to the input point.
    pub fn grad_x(&self, x: &[f64]) -> Result<Vec<f64>> {
        let dim = self.kernel.dim();
        let mut out = vec![0.0; dim];
        for (i, &w) in self.weights.iter().enumerate() {
            let center = self.centers.row(i);
            let r2: f64 = center.iter().zip(x).map(|(c, xi)| (xi - c) * (xi - c)).sum();
            let factor = w * self.kernel.grad_factor_r2(r2)?;
            for d in 0..dim {
                out[d] += factor * (x[d] - center[d]);
            }
        }
        self.basis.gradient_combination(x, &self.poly_coeffs, &mut out);
        Ok(out)
    }

    /// Gradient energy `integral of |grad^m D|^2 = (-1)^m c_k w^T A w`.
    /// Clamped to zero within rounding; a materially negative value means the
    /// kernel constant's sign convention is inconsistent and is an error.
    pub fn penalty_energy(&self) -> Result<f64> {
        let n = self.centers.rows();
        let mut quad = 0.0;
        for i in 0..n {
            let wi = self.weights[i];
            if wi == 0.0 {
                continue;
            }
            for j in 0..n {
                let r2: f64 = self
                    .centers
                    .row(i)
                    .iter()
                    .zip(self.centers.row(j))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                quad += wi * self.weights[j] * self.kernel.eval_r2(r2).expect("positive-order kernel");
            }
        }
        let sign = if self.kernel.order() % 2 == 0 { 1.0 } else { -1.0 };
        let energy = sign * self.c_k * quad;
        if energy < -ENERGY_TOL {
            return Err(DiscriminatorError::NegativeEnergy(energy));
        }
        Ok(energy.max(0.0))
    }

    /// Serialize to the interchange JSON document.
    pub fn to_json(&self) -> String {
        let doc = LsDocument {
            m: self.kernel.order(),
            n: self.kernel.dim() as u32,
            centers: (0..self.centers.rows()).map(|i| self.centers.row(i).to_vec()).collect(),
            weights: self.weights.clone(),
            poly_coeffs: self.poly_coeffs.clone(),
            lambda_d: self.lambda_d,
            c_k: self.c_k,
        };
        serde_json::to_string_pretty(&doc).expect("document serializes")
    }

    /// Reload a fitted discriminator. Labels are not part of the document;
    /// the reloaded value evaluates identically but keeps no training labels.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: LsDocument =
            serde_json::from_str(text).map_err(|e| DiscriminatorError::Serialization(e.to_string()))?;
        let kernel = PolyKernel::new(doc.m, doc.n)?;
        if kernel.exponent() <= 0 {
            return Err(DiscriminatorError::InvalidOrder { k: kernel.exponent() });
        }
        let basis = PolyBasis::new(doc.n as usize, doc.m)?;
        if doc.weights.len() != doc.centers.len() || doc.poly_coeffs.len() != basis.len() {
            return Err(DiscriminatorError::Serialization(
                "weight or coefficient count does not match centers/basis".into(),
            ));
        }
        let centers = DenseMatrix::from_rows(&doc.centers)?;
        Ok(Self {
            kernel,
            basis,
            centers,
            labels: Vec::new(),
            weights: doc.weights,
            poly_coeffs: doc.poly_coeffs,
            lambda_d: doc.lambda_d,
            c_k: doc.c_k,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct LsDocument {
    m: u32,
    n: u32,
    centers: Vec<Vec<f64>>,
    weights: Vec<f64>,
    poly_coeffs: Vec<f64>,
    lambda_d: f64,
    c_k: f64,
}
