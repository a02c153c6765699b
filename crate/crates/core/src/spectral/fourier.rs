//! Fourier coefficients over one window of length `q_λ`:
//! `G_λ(h) = (1/q_λ) Σ_{u<q_λ} g(u) e(h u / q_λ)`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::sum::{pairwise_sum, pairwise_sum_slice};
use crate::alphafun::AlphaFunction;
use crate::error::{Error, Result};
use crate::phase;

/// Windows up to this length are transformed by direct summation.
pub const DIRECT_LIMIT: u64 = 4096;

/// Default largest window accepted by [`fourier_coeffs`].
pub const DEFAULT_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierTable {
    pub lambda: usize,
    pub q: u64,
    pub coeffs: Vec<Complex64>,
}

impl FourierTable {
    /// `Σ_h |G_λ(h)|²`.
    pub fn energy(&self) -> f64 {
        pairwise_sum(self.coeffs.len(), |h| self.coeffs[h].norm_sqr())
    }

    /// `Σ_h |G_λ(h)|⁴`.
    pub fn fourth_moment(&self) -> f64 {
        pairwise_sum(self.coeffs.len(), |h| self.coeffs[h].norm_sqr().powi(2))
    }

    /// `max_h |G_λ(h)|`.
    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `e(j / q)` for `j < q`.
fn twiddles(q: usize) -> Vec<Complex64> {
    (0..q).map(|j| phase::e(j as f64 / q as f64)).collect()
}

/// Direct `O(q²)` evaluation of `(1/q) Σ_u x_u e(h u / q)`.
pub fn dft_direct(values: &[Complex64]) -> Vec<Complex64> {
    let q = values.len();
    let tw = twiddles(q);
    (0..q)
        .map(|h| pairwise_sum(q, |u| values[u] * tw[(h * u) % q]) / q as f64)
        .collect()
}

/// The same transform through an exact-length FFT.
pub fn dft_fast(values: &[Complex64]) -> Vec<Complex64> {
    let q = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_inverse(q).process(&mut buf);
    let scale = 1.0 / q as f64;
    buf.iter_mut().for_each(|z| *z *= scale);
    buf
}

pub fn fourier_coeffs(g: &AlphaFunction, lambda: usize) -> Result<FourierTable> {
    fourier_coeffs_capped(g, lambda, DEFAULT_CAP)
}

pub fn fourier_coeffs_capped(g: &AlphaFunction, lambda: usize, cap: u64) -> Result<FourierTable> {
    let q = window(g, lambda, cap)?;
    let values = g.values(0, q as usize)?;
    let coeffs = if q <= DIRECT_LIMIT {
        dft_direct(&values)
    } else {
        dft_fast(&values)
    };
    Ok(FourierTable { lambda, q, coeffs })
}

fn window(g: &AlphaFunction, lambda: usize, cap: u64) -> Result<u64> {
    let scale = g.scale();
    if lambda > scale.max_index() {
        return Err(Error::Range(format!("lambda = {lambda} beyond the scale")));
    }
    let q = scale.q(lambda);
    if q > cap {
        return Err(Error::Cap { len: q, cap });
    }
    Ok(q)
}

/// Both sides of an identity and their distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub delta: f64,
}

impl IdentityCheck {
    pub fn new(lhs: Complex64, rhs: Complex64) -> Self {
        Self {
            lhs,
            rhs,
            delta: (lhs - rhs).norm(),
        }
    }
}

/// `Σ_h |G_λ(h)|² = (1/q_λ) Σ_{u<q_λ} |g(u)|²`.
pub fn parseval_check(g: &AlphaFunction, lambda: usize) -> Result<IdentityCheck> {
    let table = fourier_coeffs(g, lambda)?;
    let values = g.values(0, table.q as usize)?;
    let rhs = pairwise_sum(values.len(), |u| values[u].norm_sqr()) / table.q as f64;
    Ok(IdentityCheck::new(table.energy().into(), rhs.into()))
}

/// The cyclic correlation identity
/// `Σ_h |G_λ(h)|² e(−h r / q_λ) = (1/q_λ) Σ_{v<q_λ} g((v + r) mod q_λ) conj(g(v))`.
///
/// With `G_λ` built on `e(+h u / q_λ)`, the shift `r` enters the spectral side
/// with the negative sign.
pub fn cyclic_identity_check(g: &AlphaFunction, lambda: usize, r: u64) -> Result<IdentityCheck> {
    let table = fourier_coeffs(g, lambda)?;
    let q = table.q as usize;
    let values = g.values(0, q)?;
    Ok(cyclic_identity_from(&table.coeffs, &values, r))
}

/// The cyclic identity for precomputed coefficients and window values.
pub fn cyclic_identity_from(coeffs: &[Complex64], values: &[Complex64], r: u64) -> IdentityCheck {
    let q = values.len();
    let tw = twiddles(q);
    let rr = (r % q as u64) as usize;
    let power: Vec<Complex64> = coeffs.iter().map(|z| z.norm_sqr().into()).collect();
    let lhs = pairwise_sum(q, |h| power[h] * tw[(q - (h * rr) % q) % q]);
    let products: Vec<Complex64> = (0..q)
        .map(|v| values[(v + rr) % q] * values[v].conj())
        .collect();
    let rhs = pairwise_sum_slice(&products) / q as f64;
    IdentityCheck::new(lhs, rhs)
}
