use std::collections::BTreeMap;

use super::{PolyharmonicError, Result};

/// Multinomial coefficients stay within u64 for orders up to 20.
const MAX_ORDER: u32 = 20;

/// A multi-index `a` of non-negative integers with its multinomial
/// coefficient `|a|! / a!` kept as an exact integer.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MultiIndex {
    entries: Vec<u32>,
    coefficient: u64,
}

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        let order: u32 = entries.iter().sum();
        if order > MAX_ORDER {
            return Err(PolyharmonicError::Overflow { order });
        }
        // |a|!/a! = prod_i C(a_1 + ... + a_i, a_i), each factor exact.
        let mut coefficient: u64 = 1;
        let mut partial: u64 = 0;
        for &e in &entries {
            partial += u64::from(e);
            let factor = super::binomial(partial, u64::from(e))
                .ok_or(PolyharmonicError::Overflow { order })?;
            coefficient = coefficient
                .checked_mul(factor)
                .ok_or(PolyharmonicError::Overflow { order })?;
        }
        Ok(Self { entries, coefficient })
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Total order `|a|`.
    pub fn order(&self) -> u32 {
        self.entries.iter().sum()
    }

    /// Multinomial coefficient `|a|!/a!`.
    pub fn coefficient(&self) -> u64 {
        self.coefficient
    }
}

/// All multi-indices of dimension `n` and order exactly `m`, in graded
/// lexicographic order with the leading entry largest first. This ordering is
/// frozen: it defines the layout of polynomial coefficient vectors on disk.
pub fn enumerate_multi_indices(n: usize, m: u32) -> Result<Vec<MultiIndex>> {
    if n == 0 {
        return Err(PolyharmonicError::InvalidParams { m, n: 0 });
    }
    if m > MAX_ORDER {
        return Err(PolyharmonicError::Overflow { order: m });
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fill(&mut out, &mut current, 0, m)?;
    Ok(out)
}

fn fill(out: &mut Vec<MultiIndex>, current: &mut Vec<u32>, pos: usize, remaining: u32) -> Result<()> {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex::new(current.clone())?);
        current[pos] = 0;
        return Ok(());
    }
    for v in (0..=remaining).rev() {
        current[pos] = v;
        fill(out, current, pos + 1, remaining - v)?;
    }
    current[pos] = 0;
    Ok(())
}

/// Squared L2 norm of the m-th order gradient from its partial derivatives:
/// `sum over |a| = m of (m!/a!) (d^a f)^2`.
///
/// `partials` maps a multi-index's entries to the value of that mixed partial.
/// Every index of order `m` must be present.
pub fn grad_norm_sq(n: usize, m: u32, partials: &BTreeMap<Vec<u32>, f64>) -> Result<f64> {
    let indices = enumerate_multi_indices(n, m)?;
    let mut sum = 0.0;
    for idx in &indices {
        let value = partials
            .get(idx.entries())
            .ok_or_else(|| PolyharmonicError::MissingIndex(idx.entries().to_vec()))?;
        sum += idx.coefficient() as f64 * value * value;
    }
    Ok(sum)
}
