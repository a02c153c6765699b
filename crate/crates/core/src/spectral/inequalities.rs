//! The Fejér kernel identity, the large sieve inequality and van der Corput's
//! inequality, evaluated numerically.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fourier::IdentityCheck;
use crate::error::{Error, Result};
use crate::phase;

/// Slack allowed on the large sieve bound.
pub const SIEVE_SLACK: f64 = 1e-9;

/// Relative slack (times `|I|²`) allowed on van der Corput's bound.
pub const VDC_SLACK: f64 = 1e-9;

/// `e(r x)` for signed `r`.
fn e_signed(r: i64, x: f64) -> Complex64 {
    let z = phase::e_mul(r.unsigned_abs(), x);
    if r < 0 {
        z.conj()
    } else {
        z
    }
}

/// `Σ_{|r|<R} (R − |r|) e(r x) = |Σ_{r<R} e(r x)|²`.
pub fn fejer_check(r_len: u64, x: f64) -> Result<IdentityCheck> {
    if r_len == 0 {
        return Err(Error::Range("fejer_check needs R >= 1".into()));
    }
    let big_r = r_len as i64;
    let lhs: Complex64 = (1 - big_r..big_r)
        .map(|r| e_signed(r, x) * (big_r - r.abs()) as f64)
        .sum();
    let partial: Complex64 = (0..r_len).map(|r| phase::e_mul(r, x)).sum();
    Ok(IdentityCheck::new(lhs, partial.norm_sqr().into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub bound: f64,
    pub ok: bool,
}

/// `Σ_{h<H} |(1/R) Σ_{r<R} e(r(t + h/H))|² ≤ (H + R − 1)/R`.
pub fn large_sieve_check(h_len: u64, r_len: u64, t: f64) -> Result<BoundCheck> {
    if h_len == 0 || r_len == 0 {
        return Err(Error::Range("large_sieve_check needs H, R >= 1".into()));
    }
    let lhs: f64 = (0..h_len)
        .map(|h| {
            let x = t + h as f64 / h_len as f64;
            let s: Complex64 = (0..r_len).map(|r| phase::e_mul(r, x)).sum();
            (s / r_len as f64).norm_sqr()
        })
        .sum();
    let bound = (h_len + r_len - 1) as f64 / r_len as f64;
    Ok(BoundCheck {
        lhs,
        bound,
        ok: lhs <= bound + SIEVE_SLACK,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VdcCheck {
    pub lhs: f64,
    pub rhs: Complex64,
    pub ok: bool,
}

/// `|Σ a_n|² ≤ ((|I| − 1 + R)/R) Σ_{|r|<R} (1 − |r|/R) Σ_{n, n+r ∈ I} a_{n+r} conj(a_n)`.
pub fn vdc_check(seq: &[Complex64], r_len: usize) -> Result<VdcCheck> {
    let len = seq.len();
    if r_len == 0 || r_len > len {
        return Err(Error::Range(format!(
            "vdc_check needs 1 <= R <= |I| = {len}"
        )));
    }
    let lhs = seq.iter().sum::<Complex64>().norm_sqr();
    let big_r = r_len as i64;
    let mut inner = Complex64::default();
    for r in 1 - big_r..big_r {
        let weight = 1.0 - r.unsigned_abs() as f64 / r_len as f64;
        let (lo, hi) = if r >= 0 {
            (0, len - r as usize)
        } else {
            (r.unsigned_abs() as usize, len)
        };
        let c: Complex64 = (lo..hi)
            .map(|n| seq[(n as i64 + r) as usize] * seq[n].conj())
            .sum();
        inner += c * weight;
    }
    let rhs = inner * ((len - 1 + r_len) as f64 / r_len as f64);
    let ok = lhs <= rhs.re + VDC_SLACK * (len * len) as f64;
    Ok(VdcCheck { lhs, rhs, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fejer_examples() {
        let c = fejer_check(2, 0.0).unwrap();
        assert_eq!(c.lhs, Complex64::new(4.0, 0.0));
        assert_eq!(c.rhs, Complex64::new(4.0, 0.0));
        for x in [0.0, 0.1, 0.77] {
            let c = fejer_check(1, x).unwrap();
            assert_eq!(c.lhs, Complex64::new(1.0, 0.0));
            assert_eq!(c.rhs, Complex64::new(1.0, 0.0));
        }
        assert!(fejer_check(0, 0.1).is_err());
    }

    #[test]
    fn sieve_examples() {
        let c = large_sieve_check(1, 5, 0.0).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-15 && c.bound == 1.0 && c.ok);
        let c = large_sieve_check(2, 2, 0.0).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-15);
        assert_eq!(c.bound, 1.5);
        assert!(c.ok);
    }

    #[test]
    fn vdc_examples() {
        let ones = vec![Complex64::new(1.0, 0.0); 2];
        let c = vdc_check(&ones, 1).unwrap();
        assert_eq!(c.lhs, 4.0);
        assert_eq!(c.rhs, Complex64::new(4.0, 0.0));
        assert!(c.ok);

        let mut single = vec![Complex64::default(); 10];
        single[4] = Complex64::new(0.6, -0.8);
        for r in 1..=10 {
            let c = vdc_check(&single, r).unwrap();
            let expected = c.rhs.re * r as f64 / (10 - 1 + r) as f64;
            assert!((c.lhs - expected).abs() < 1e-14);
            assert!(c.ok);
        }
        assert!(vdc_check(&single, 11).is_err());
        assert!(vdc_check(&single, 0).is_err());
    }

    proptest! {
        #[test]
        fn fejer_holds(r in 1u64..=64, x in -1.0f64..1.0) {
            let c = fejer_check(r, x).unwrap();
            prop_assert!(c.delta <= 1e-10 * (r * r) as f64);
        }

        #[test]
        fn sieve_holds(h in 1u64..=128, r in 1u64..=128, t in -1.0f64..1.0) {
            prop_assert!(large_sieve_check(h, r, t).unwrap().ok);
        }

        #[test]
        fn vdc_holds(
            seq in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=64),
            r_frac in 0.0f64..1.0,
        ) {
            let seq: Vec<Complex64> = seq.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            let r = 1 + ((seq.len() - 1) as f64 * r_frac) as usize;
            prop_assert!(vdc_check(&seq, r).unwrap().ok);
        }
    }
}
