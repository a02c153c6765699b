//! Phases `e(x) = exp(2πix)` with arguments reduced modulo one.

use num_complex::Complex64;

/// `{n·x}`, the fractional part of `n·x` in `[0, 1)`.
///
/// `x` is treated as the exact dyadic rational it represents, so the
/// reduction is carried out in integer arithmetic and the only rounding is
/// the final conversion back to `f64`.
pub fn frac_mul(n: u64, x: f64) -> f64 {
    if n == 0 || x == 0.0 || !x.is_finite() {
        return 0.0;
    }
    let bits = x.abs().to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let frac_bits = bits & ((1u64 << 52) - 1);
    let (mantissa, exp) = if biased == 0 {
        (frac_bits, -1074)
    } else {
        (frac_bits | (1u64 << 52), biased - 1075)
    };
    if exp >= 0 {
        return 0.0;
    }
    let shift = (-exp) as u32;
    let product = n as u128 * mantissa as u128;
    let r = if shift >= 128 {
        product as f64 * 2f64.powi(-(shift as i32))
    } else {
        let rem = product & ((1u128 << shift) - 1);
        rem as f64 * 2f64.powi(-(shift as i32))
    };
    let r = if x < 0.0 && r > 0.0 { 1.0 - r } else { r };
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `{x}` in `[0, 1)`.
pub fn frac(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `e(x) = exp(2πix)`, evaluated on the representative of `x` in `[−1/2, 1/2]`.
pub fn e(x: f64) -> Complex64 {
    let y = x - x.round();
    let (s, c) = (std::f64::consts::TAU * y).sin_cos();
    Complex64::new(c, s)
}

/// `e(n·x)` with exact reduction of the argument.
pub fn e_mul(n: u64, x: f64) -> Complex64 {
    e(frac_mul(n, x))
}

/// `e(−n·x)`.
pub fn e_neg_mul(n: u64, x: f64) -> Complex64 {
    e_mul(n, x).conj()
}
