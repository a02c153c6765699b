//! Checks with exact constants: the carry bound, the asymptotic densities of
//! the truncation classes `{n : ψ_λ(n) = a}`, and the block gap structure.

use num_complex::Complex64;
use rayon::prelude::*;

use super::report::CheckReport;
use crate::alphafun::AlphaFunction;
use crate::cfrac::{expand, tail, ConvergentTable, QuotientSpec, DEFAULT_TAIL_DEPTH};
use crate::error::{Error, Result};
use crate::numeration::{w_sequence, GapKind, Odometer};

/// A product of high-digit atoms counts as different from 1 beyond this.
pub const CARRY_TOLERANCE: f64 = 1e-9;

/// Absolute tolerance on empirical densities at `N = 10⁶`.
pub const DENSITY_TOLERANCE: f64 = 0.005;

/// Tolerance on `Σ_a δ(λ, a) = 1`.
pub const PARTITION_TOLERANCE: f64 = 1e-10;

fn differs_from_one(z: Complex64) -> bool {
    (z - Complex64::new(1.0, 0.0)).norm_sqr() > CARRY_TOLERANCE * CARRY_TOLERANCE
}

/// `|{n < N : H(n + r) conj(H(n)) ≠ 1}|` for high-digit factors `H`.
pub fn carry_count(high: &[Complex64], r: usize, n: usize) -> u64 {
    let shifted = &high[r..r + n];
    let base = &high[..n];
    shifted
        .iter()
        .zip(base)
        .filter(|(a, b)| differs_from_one(**a * b.conj()))
        .count() as u64
}

/// [`carry_count`] at each of the increasing truncations `ns`, in one pass.
fn running_counts(high: &[Complex64], r: usize, ns: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(ns.len());
    let mut count = 0u64;
    let mut done = 0usize;
    for &n in ns {
        let n = n as usize;
        count += carry_count(&high[done..], r, n - done);
        done = n;
        out.push(count);
    }
    out
}

fn record_carry(
    report: &mut CheckReport,
    count: u64,
    n: u64,
    r: u64,
    q_prev: u64,
    label: impl FnOnce() -> String,
) {
    let pass = count as u128 * q_prev as u128 <= n as u128 * r as u128;
    let bound = n as f64 * r as f64 / q_prev as f64;
    report.record(pass, count as f64, bound, label);
}

/// Counts the `n < N` at which `g(n+r) conj(g(n)) ≠ g_λ(n+r) conj(g_λ(n))` and
/// compares with `N r / q_{λ−1}` in exact integer arithmetic.
pub fn carry_bound_check(g: &AlphaFunction, lambda: usize, r: u64, n: u64) -> Result<CheckReport> {
    if lambda == 0 || lambda > g.scale().max_index() {
        return Err(Error::Range(format!(
            "carry check needs 1 <= lambda <= {}",
            g.scale().max_index()
        )));
    }
    let high = g.high_values(lambda, 0, (n + r) as usize)?;
    let count = carry_count(&high, r as usize, n as usize);
    let mut report = CheckReport::new("carry");
    record_carry(&mut report, count, n, r, g.scale().q(lambda - 1), || {
        format!("lambda={lambda} r={r} N={n} count={count}")
    });
    Ok(report)
}

/// Every `r < q_{λ−1}` for each `λ` in `lambdas`, at every `N` in `ns`.
pub fn carry_sweep(
    g: &AlphaFunction,
    lambdas: impl IntoIterator<Item = usize>,
    ns: &[u64],
) -> Result<CheckReport> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    let n_max = *ns
        .last()
        .ok_or_else(|| Error::Range("carry sweep needs some N".into()))? as usize;
    let mut report = CheckReport::new("carry");
    for lambda in lambdas {
        if lambda == 0 || lambda > g.scale().max_index() {
            return Err(Error::Range(format!(
                "carry sweep lambda = {lambda} outside the scale"
            )));
        }
        let q_prev = g.scale().q(lambda - 1);
        let high = g.high_values(lambda, 0, n_max + q_prev as usize)?;
        let snapshots: Vec<Vec<u64>> = (0..q_prev as usize)
            .into_par_iter()
            .map(|r| running_counts(&high, r, &ns))
            .collect();
        for (r, counts) in snapshots.into_iter().enumerate() {
            for (&n, count) in ns.iter().zip(counts) {
                record_carry(&mut report, count, n, r as u64, q_prev, || {
                    format!("lambda={lambda} r={r} N={n} count={count}")
                });
            }
        }
    }
    Ok(report)
}

/// Asymptotic density of `{n : ψ_λ(n) = a}`: `δ = 1/(q_λ + q_{λ−1} t)` when
/// `a ≥ q_{λ−1}` and `δ(1 + t)` otherwise, with `t = [0; a_{λ+1}, a_{λ+2}, …]`.
pub fn crt_density(spec: &QuotientSpec, lambda: usize, a: u64) -> Result<f64> {
    if lambda == 0 {
        return Err(Error::Range("density needs lambda >= 1".into()));
    }
    let table = expand(spec, lambda)?;
    let (q, q_prev) = (table.q(lambda), table.q(lambda - 1));
    if a >= q {
        return Err(Error::Range(format!(
            "a = {a} must be below q_{lambda} = {q}"
        )));
    }
    let t = tail(spec, lambda, DEFAULT_TAIL_DEPTH)?.value;
    let delta = 1.0 / (q as f64 + q_prev as f64 * t);
    Ok(if a >= q_prev {
        delta
    } else {
        delta * (1.0 + t)
    })
}

/// `ψ_λ(n)` for `λ = 0..=lambda_max`, from a digit slice.
fn truncations(digits: &[u32], scale: &ConvergentTable, lambda_max: usize, out: &mut [u64]) {
    let mut acc = 0u64;
    for (lambda, slot) in out.iter_mut().enumerate().take(lambda_max + 1) {
        *slot = acc;
        if lambda < digits.len() {
            acc += digits[lambda] as u64 * scale.q(lambda);
        }
    }
}

fn ensure_range(spec: &QuotientSpec, n: u64, lambda: usize) -> Result<ConvergentTable> {
    let table = crate::cfrac::covering(spec, n)?;
    if table.max_index() >= lambda {
        Ok(table)
    } else {
        expand(spec, lambda.max(1))
    }
}

/// Empirical density of `{n < N : ψ_λ(n) = a}` against [`crt_density`].
pub fn density_check(lambda: usize, a: u64, n: u64, spec: &QuotientSpec) -> Result<CheckReport> {
    let formula = crt_density(spec, lambda, a)?;
    let table = ensure_range(spec, n, lambda)?;
    let mut hits = 0u64;
    let mut psi = vec![0u64; lambda + 1];
    Odometer::for_each_in(&table, 0, n, |_, digits| {
        truncations(digits, &table, lambda, &mut psi);
        hits += (psi[lambda] == a) as u64;
    })?;
    let empirical = hits as f64 / n as f64;
    let mut report = CheckReport::new("density");
    report.record_le((empirical - formula).abs(), DENSITY_TOLERANCE, || {
        format!("{spec} lambda={lambda} a={a} empirical={empirical} formula={formula}")
    });
    Ok(report)
}

/// Every `1 ≤ λ ≤ lambda_max` and `a < q_λ` in one pass over `n < N`, plus
/// `Σ_a δ(λ, a) = 1` for each `λ`.
pub fn density_sweep(spec: &QuotientSpec, lambda_max: usize, n: u64) -> Result<CheckReport> {
    let table = ensure_range(spec, n, lambda_max)?;
    let mut hist: Vec<Vec<u64>> = (0..=lambda_max)
        .map(|l| vec![0; table.q(l) as usize])
        .collect();
    let mut psi = vec![0u64; lambda_max + 1];
    Odometer::for_each_in(&table, 0, n, |_, digits| {
        truncations(digits, &table, lambda_max, &mut psi);
        for lambda in 1..=lambda_max {
            hist[lambda][psi[lambda] as usize] += 1;
        }
    })?;
    let mut report = CheckReport::new("density");
    for (lambda, counts) in hist.iter().enumerate().skip(1) {
        let mut total = 0.0;
        for (a, &hits) in counts.iter().enumerate() {
            let formula = crt_density(spec, lambda, a as u64)?;
            total += formula;
            let empirical = hits as f64 / n as f64;
            report.record_le((empirical - formula).abs(), DENSITY_TOLERANCE, || {
                format!("{spec} lambda={lambda} a={a} empirical={empirical} formula={formula}")
            });
        }
        report.record_le((total - 1.0).abs(), PARTITION_TOLERANCE, || {
            format!("{spec} lambda={lambda} sum of densities = {total}")
        });
    }
    Ok(report)
}

/// Cross-checks the first `count` gaps of the stepped block walk against a
/// brute-force scan for integers with vanishing low digits.
pub fn gap_structure_check(
    lambda: usize,
    count: usize,
    scale: &ConvergentTable,
) -> Result<CheckReport> {
    let blocks = w_sequence(lambda, count + 1, scale)?;
    let (long, short) = (scale.q(lambda), scale.q(lambda - 1));
    let full = scale.a(lambda + 1).expect("w_sequence checked a_{λ+1}");

    // (start, ε_λ(start)) for integers whose digits below λ vanish.
    let mut brute: Vec<(u64, u32)> = Vec::with_capacity(count + 1);
    let end = blocks.starts[count] + 1;
    Odometer::for_each_in(scale, 0, end, |n, digits| {
        if digits.iter().take(lambda).all(|&d| d == 0) {
            brute.push((n, digits.get(lambda).copied().unwrap_or(0)));
        }
    })?;

    let mut report = CheckReport::new("gaps");
    for i in 0..count {
        let gap = blocks.starts[i + 1] - blocks.starts[i];
        let aligned = brute.len() > i + 1
            && brute[i].0 == blocks.starts[i]
            && brute[i + 1].0 == blocks.starts[i + 1];
        let expected = if aligned && brute[i].1 == full {
            (GapKind::Short, short)
        } else {
            (GapKind::Long, long)
        };
        let ok = aligned && (gap == long || gap == short) && (blocks.kinds[i], gap) == expected;
        report.record(ok, (!ok) as u8 as f64, 0.0, || {
            format!(
                "lambda={lambda} block {i}: start {} gap {gap} kind {:?}",
                blocks.starts[i], blocks.kinds[i]
            )
        });
    }
    Ok(report)
}
