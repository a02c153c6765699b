//! Finite-`N` autocorrelations `γ̂_r = (1/N) Σ_{n<N} g(n+r) conj(g(n))`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sum::pairwise_sum;
use crate::alphafun::AlphaFunction;
use crate::error::{Error, Result};
use crate::numeration::{block_densities, BlockDensities};

/// `γ̂_r` from precomputed values `g(0), …, g(n + r − 1)`.
pub fn correlation_from_values(values: &[Complex64], r: usize, n: usize) -> Complex64 {
    let shifted = &values[r..r + n];
    let base = &values[..n];
    pairwise_sum(n, |i| shifted[i] * base[i].conj()) / n as f64
}

pub fn correlation(g: &AlphaFunction, r: u64, n: u64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Range("correlation needs N >= 1".into()));
    }
    let values = g.values(0, (n + r) as usize)?;
    Ok(correlation_from_values(&values, r as usize, n as usize))
}

/// `γ̂_r` for `r < R` at truncation `N`, with its quadratic and absolute means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationProfile {
    pub shifts: usize,
    pub n: u64,
    pub gamma: Vec<Complex64>,
    pub quadratic_mean: f64,
    pub absolute_mean: f64,
}

impl CorrelationProfile {
    pub fn from_gamma(gamma: Vec<Complex64>, n: u64) -> Self {
        let shifts = gamma.len();
        let quadratic_mean = gamma.iter().map(|z| z.norm_sqr()).sum::<f64>() / shifts as f64;
        let absolute_mean = gamma.iter().map(|z| z.norm()).sum::<f64>() / shifts as f64;
        Self {
            shifts,
            n,
            gamma,
            quadratic_mean,
            absolute_mean,
        }
    }

    /// The profile restricted to the first `shifts` correlations.
    pub fn prefix(&self, shifts: usize) -> Self {
        Self::from_gamma(self.gamma[..shifts.min(self.shifts)].to_vec(), self.n)
    }
}

pub fn correlation_profile(g: &AlphaFunction, shifts: usize, n: u64) -> Result<CorrelationProfile> {
    if shifts == 0 || n == 0 {
        return Err(Error::Range(
            "correlation_profile needs R >= 1 and N >= 1".into(),
        ));
    }
    let values = g.values(0, n as usize + shifts - 1)?;
    let gamma = (0..shifts)
        .into_par_iter()
        .map(|r| correlation_from_values(&values, r, n as usize))
        .collect();
    Ok(CorrelationProfile::from_gamma(gamma, n))
}

/// Comparison of `γ̂_r` with its reconstruction from one Long and one Short
/// block template of `g_λ`, weighted by the block densities below `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    pub direct: Complex64,
    pub long_template: Complex64,
    pub short_template: Complex64,
    pub densities: BlockDensities,
    pub estimate: Complex64,
    pub deviation: f64,
    pub envelope: f64,
}

/// Constant in the envelope `C (r / q_{λ−1} + q_λ / N)`.
pub const BLOCK_ENVELOPE_CONSTANT: f64 = 4.0;

pub fn block_decomposition(
    g: &AlphaFunction,
    r: u64,
    n: u64,
    lambda: usize,
) -> Result<BlockDecomposition> {
    let scale = g.scale();
    let densities = block_densities(lambda, n, scale)?;
    let (q, q_prev) = (scale.q(lambda), scale.q(lambda - 1));
    let direct = correlation(g, r, n)?;
    let trunc = g.truncated_values(lambda, 0, (q + r) as usize)?;
    let template = |len: u64| -> Complex64 {
        (0..len as usize)
            .map(|i| trunc[i + r as usize] * trunc[i].conj())
            .sum()
    };
    let long_template = template(q);
    let short_template = template(q_prev);
    let estimate = long_template * densities.long_frac + short_template * densities.short_frac;
    let envelope = BLOCK_ENVELOPE_CONSTANT * (r as f64 / q_prev as f64 + q as f64 / n as f64);
    Ok(BlockDecomposition {
        direct,
        long_template,
        short_template,
        densities,
        estimate,
        deviation: (direct - estimate).norm(),
        envelope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfrac::{covering, QuotientSpec};

    fn golden_theta(theta: f64, n: u64) -> AlphaFunction {
        AlphaFunction::from_theta(theta, covering(&QuotientSpec::golden(), n).unwrap())
    }

    #[test]
    fn examples() {
        let g = golden_theta(0.5, 10_000);
        assert_eq!(correlation(&g, 0, 1000).unwrap(), Complex64::new(1.0, 0.0));
        let c = correlation(&g, 1, 3).unwrap();
        assert!((c - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
        let one = AlphaFunction::one(covering(&QuotientSpec::silver(), 10_000).unwrap());
        for r in [0, 1, 7, 100] {
            assert_eq!(correlation(&one, r, 999).unwrap(), Complex64::new(1.0, 0.0));
        }
        assert!(correlation(&g, 1, 0).is_err());
    }

    #[test]
    fn profile_examples() {
        let one = AlphaFunction::one(covering(&QuotientSpec::golden(), 10_000).unwrap());
        let p = correlation_profile(&one, 4, 1000).unwrap();
        assert_eq!(p.quadratic_mean, 1.0);
        assert_eq!(p.absolute_mean, 1.0);
        let g = golden_theta(1.0 / 3.0, 10_000);
        let p = correlation_profile(&g, 1, 1000).unwrap();
        assert!((p.quadratic_mean - 1.0).abs() < 1e-12);
        assert!(p.gamma[0].im.abs() < 1e-15);
    }

    #[test]
    fn profile_means_are_consistent() {
        let g = golden_theta(0.1234567, 100_000);
        let p = correlation_profile(&g, 64, 20_000).unwrap();
        assert!(p.quadratic_mean <= g.modulus_bound().powi(4));
        assert!(p.quadratic_mean >= 0.0);
        // Cauchy–Schwarz between the two means.
        assert!(p.absolute_mean.powi(2) <= p.quadratic_mean + 1e-15);
        let half = p.prefix(32);
        assert_eq!(half.gamma[..], p.gamma[..32]);
    }

    #[test]
    fn block_decomposition_within_envelope() {
        for spec in ["golden", "silver"] {
            let scale = covering(&spec.parse::<QuotientSpec>().unwrap(), 300_000).unwrap();
            for theta in [0.5, 1.0 / 3.0, 0.1234567] {
                let g = AlphaFunction::from_theta(theta, scale.clone()).twist(0.3);
                for lambda in [4, 6, 8] {
                    for r in [0, 1, 3] {
                        let d = block_decomposition(&g, r, 200_000, lambda).unwrap();
                        assert!(
                            d.deviation <= d.envelope,
                            "{spec} θ={theta} λ={lambda} r={r}: {d:?}"
                        );
                    }
                }
            }
        }
    }
}
