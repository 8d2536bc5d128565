use super::{PolyharmonicError, Result};

/// Constants attached to the fundamental solution of the iterated Laplacian
/// for gradient order `m` in dimension `n`.
///
/// `varrho` follows the published piecewise closed form, which drops
/// unit-sphere surface-area factors; only relative magnitudes matter here
/// because the dual variable absorbs the scale.
#[derive(Debug, Clone, Copy)]
pub struct KernelConstants {
    /// Normalization of the fundamental solution (piecewise in m, n parity).
    pub varrho: f64,
    /// Kernel weight prefactor `(-1)^{m+1} varrho / 2`.
    pub xi: f64,
    /// Derivative bound `(2n)^m Gamma(2m + (n+1)/2) / Gamma(m + (n+1)/2)`.
    pub epsilon_bound: f64,
    /// `sum over |a| = m of 1/a!`, equal to `n^m / m!`.
    pub s_alpha: f64,
}

pub fn compute_constants(m: u32, n: u32) -> Result<KernelConstants> {
    if m < 1 || n < 1 {
        return Err(PolyharmonicError::InvalidParams { m, n });
    }
    if m + n > 150 {
        return Err(PolyharmonicError::Overflow { order: m + n });
    }

    let mf = m as f64;
    let nf = n as f64;
    let tau = nf / 2.0;

    let varrho = if n % 2 == 1 {
        // Odd dimension: half-integer Gamma arguments, never at a pole.
        2f64.powi(2 - 2 * m as i32) / factorial(m as i64 - 1)
            * (gamma(2.0 - tau) / gamma(mf + 1.0 - tau))
    } else if n == 2 {
        (2f64.powi(1 - m as i32) / factorial(m as i64 - 1)).powi(2)
    } else {
        let tau_i = n as i64 / 2;
        let mi = m as i64;
        if mi <= tau_i - 2 {
            neg_one_pow(m as i32 - 1) * 2f64.powi(2 - 2 * m as i32) / factorial(mi - 1)
                * factorial(tau_i - mi - 1)
                / factorial(tau_i - 1)
        } else {
            -(2f64.powi(2 - 2 * m as i32))
                / (factorial(mi - 1) * factorial(tau_i - 2) * factorial(mi - tau_i))
        }
    };

    let xi = neg_one_pow(m as i32 + 1) * varrho / 2.0;

    // Evaluated in log space so large orders stay finite.
    let epsilon_bound = (mf * (2.0 * nf).ln()
        + ln_gamma(2.0 * mf + (nf + 1.0) / 2.0)
        - ln_gamma(mf + (nf + 1.0) / 2.0))
    .exp();
    if !epsilon_bound.is_finite() {
        return Err(PolyharmonicError::Overflow { order: m + n });
    }

    let s_alpha = nf.powi(m as i32) / factorial(m as i64);

    Ok(KernelConstants { varrho, xi, epsilon_bound, s_alpha })
}

fn neg_one_pow(p: i32) -> f64 {
    if p.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Integer factorial as f64; negative arguments sit on Gamma poles and map
/// to infinity, so a 1/(-k)! factor correctly evaluates to zero.
fn factorial(i: i64) -> f64 {
    if i < 0 {
        return f64::INFINITY;
    }
    let mut acc = 1.0f64;
    for v in 2..=i {
        acc *= v as f64;
    }
    acc
}

// Lanczos approximation (g = 7, 9 terms).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments, using reflection for x < 0.5.
/// Accurate to ~1e-13 relative over the ranges used here.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x)).
        let s = (std::f64::consts::PI * x).sin();
        if s == 0.0 {
            return f64::INFINITY;
        }
        return std::f64::consts::PI / (s * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Natural log of Gamma for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}
