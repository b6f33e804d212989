//! Eta-invariant engines: closed forms for the twisted circle, a
//! zeta-regularized numeric route, reduced eta, the sharp-product formula
//! and its brute-force check, and the spectral-flow corrected combination.

use serde::Serialize;

use crate::circlevals::{circle_eq, CircleValue, Scalar};
use crate::error::{domain, Error, Result};
use crate::spectra::{eta_partial_sum, sharp_product_spectrum, BlockOperatorData, Spectrum};

/// Unreduced eta at `s = 0` together with the kernel data that turns it into
/// an ℝ/ℤ value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaResult {
    pub eta: Scalar,
    pub kernel_dim: u64,
    /// `(eta + kernel_dim) / 2`
    pub hat_eta: Scalar,
    /// `hat_eta mod 1`
    pub reduced: CircleValue,
}

impl EtaResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }
}

/// Assembles `η̂ = (η + h)/2` and its class mod ℤ.
pub fn reduced_eta(eta: Scalar, kernel_dim: u64) -> Result<EtaResult> {
    if !eta.is_finite() {
        return domain(format!("eta must be finite, got {eta}"));
    }
    let hat_eta = (eta + Scalar::int(kernel_dim as i64)) * Scalar::HALF;
    Ok(EtaResult { eta, kernel_dim, hat_eta, reduced: CircleValue::from_scalar(hat_eta)? })
}

fn in_open_unit_interval(a: Scalar) -> bool {
    match a {
        Scalar::Exact(r) => r > 0.into() && r < 1.into(),
        Scalar::Float(x) => x > 0.0 && x < 1.0,
    }
}

/// Eta of the circle Dirac operator twisted by holonomy `a ∈ (0,1)`:
/// `η = 1 - 2a`, kernel dimension 1, reduced `1 - a`.
pub fn eta_circle_flat(a: Scalar) -> Result<EtaResult> {
    if !in_open_unit_interval(a) {
        return domain(format!(
            "twist {a} outside (0,1); use the untwisted circle (eta 0, kernel 1) for a = 0"
        ));
    }
    reduced_eta(Scalar::ONE - Scalar::int(2) * a, 1)
}

/// Settings for the Euler–Maclaurin evaluation of the Hurwitz zeta function.
#[derive(Clone, Copy, Debug)]
pub struct HurwitzConfig {
    /// Number of Bernoulli correction terms.
    pub corrections: usize,
    /// Largest number of directly summed terms before giving up.
    pub max_terms: usize,
    /// Target size of the first omitted correction term.
    pub tolerance: f64,
}

impl Default for HurwitzConfig {
    fn default() -> Self {
        HurwitzConfig { corrections: 8, max_terms: 10_000, tolerance: 1e-14 }
    }
}

// B_{2k} for k = 1..=9
const BERNOULLI_EVEN: [f64; 9] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
];

fn euler_maclaurin(s: f64, a: f64, n: usize, corrections: usize) -> (f64, f64) {
    let direct: f64 = (0..n).rev().map(|k| (k as f64 + a).powf(-s)).sum();
    let x = n as f64 + a;
    let mut total = direct + x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);

    // term_k = B_{2k}/(2k)! * s(s+1)...(s+2k-2) * x^{-s-2k+1}
    let mut rising = s; // s(s+1)...(s+2k-2)
    let mut fact = 2.0; // (2k)!
    let mut xpow = x.powf(-s - 1.0);
    let mut residual = 0.0;
    for k in 1..=corrections + 1 {
        let term = BERNOULLI_EVEN[k - 1] / fact * rising * xpow;
        if k <= corrections {
            total += term;
        } else {
            residual = term.abs();
        }
        let kk = k as f64;
        rising *= (s + 2.0 * kk - 1.0) * (s + 2.0 * kk);
        fact *= (2.0 * kk + 1.0) * (2.0 * kk + 2.0);
        xpow /= x * x;
    }
    (total, residual)
}

/// `ζ(s, a) = Σ_{n≥0} (n+a)^{-s}`, analytically continued, for real `s ≠ 1`.
pub fn hurwitz_zeta(s: f64, a: f64, cfg: &HurwitzConfig) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() || !s.is_finite() {
        return domain(format!("hurwitz zeta needs finite s and a > 0, got s={s}, a={a}"));
    }
    if s == 1.0 {
        return domain("hurwitz zeta has a pole at s = 1");
    }
    if cfg.corrections == 0 || cfg.corrections > BERNOULLI_EVEN.len() - 1 {
        return domain(format!("correction count must be in 1..={}", BERNOULLI_EVEN.len() - 1));
    }
    let mut n = 10usize;
    loop {
        let (value, residual) = euler_maclaurin(s, a, n, cfg.corrections);
        if residual <= cfg.tolerance * value.abs().max(1.0) {
            return Ok(value);
        }
        if n >= cfg.max_terms {
            return Err(Error::Numeric {
                message: format!("hurwitz zeta at s={s}, a={a} did not converge within {} terms", cfg.max_terms),
                residual,
            });
        }
        n = (n * 4).min(cfg.max_terms);
    }
}

/// Eta function `ζ(s,a) - ζ(s,1-a)` of the twisted circle operator.
pub fn twisted_circle_eta(a: f64, s: f64, cfg: &HurwitzConfig) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return domain(format!("twist must lie in (0,1), got {a}"));
    }
    Ok(hurwitz_zeta(s, a, cfg)? - hurwitz_zeta(s, 1.0 - a, cfg)?)
}

/// Numeric eta of the twisted circle operator at `s = 0`.
pub fn hurwitz_eta_zero(a: f64) -> Result<f64> {
    twisted_circle_eta(a, 0.0, &HurwitzConfig::default())
}

/// `Ind(P⁺) · η(A)`.
pub fn eta_sharp(index_plus: Scalar, eta_a: Scalar) -> Scalar {
    index_plus * eta_a
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BruteForceEta {
    pub value: f64,
    /// Set when the input spectrum is not negation-symmetric, so a truncated
    /// partial sum need not represent the regularized value.
    pub truncation_bias: bool,
}

/// Builds the full block-operator spectrum and sums it at `s = 0`.
pub fn eta_sharp_bruteforce(p: &BlockOperatorData, a_spec: &Spectrum) -> BruteForceEta {
    let full = sharp_product_spectrum(p, a_spec);
    BruteForceEta { value: eta_partial_sum(&full, 0.0), truncation_bias: !a_spec.is_symmetric() }
}

/// `η̂ - sf mod 1`; the integer spectral flow drops out mod ℤ.
pub fn dai_zhang_reduced(aps: &EtaResult, sf: i64) -> Result<CircleValue> {
    let value = CircleValue::from_scalar(aps.hat_eta - Scalar::int(sf))?;
    let tol = if value.is_exact() && aps.reduced.is_exact() { 0.0 } else { 1e-9 };
    debug_assert!(circle_eq(value, aps.reduced, tol).unwrap_or(false));
    Ok(value)
}
