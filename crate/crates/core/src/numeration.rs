//! Ostrowski expansions `n = Σ ε_k q_k`, digit statistics, the truncation
//! `ψ_λ`, and the blocks between consecutive integers whose low `λ` digits vanish.
//!
//! Digit vectors are stored least significant first with trailing zeros trimmed.

use crate::cfrac::ConvergentTable;
use crate::error::{Error, Result};

/// A legal Ostrowski digit vector `ε_0, ε_1, …` over a fixed scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitString<'a> {
    digits: Vec<u32>,
    scale: &'a ConvergentTable,
}

impl<'a> DigitString<'a> {
    /// Checks the digit conditions; trailing zeros are trimmed.
    pub fn new(mut digits: Vec<u32>, scale: &'a ConvergentTable) -> Result<Self> {
        if !validate(&digits, scale) {
            return Err(Error::Validation(format!(
                "{digits:?} is not a legal Ostrowski expansion"
            )));
        }
        trim(&mut digits);
        Ok(Self { digits, scale })
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// `ε_k`, zero past the stored length.
    pub fn digit(&self, k: usize) -> u32 {
        self.digits.get(k).copied().unwrap_or(0)
    }

    pub fn scale(&self) -> &'a ConvergentTable {
        self.scale
    }

    pub fn value(&self) -> u64 {
        dot(&self.digits, self.scale)
    }

    pub fn sigma(&self) -> u64 {
        self.digits.iter().map(|&d| d as u64).sum()
    }
}

fn trim(digits: &mut Vec<u32>) {
    while digits.last() == Some(&0) {
        digits.pop();
    }
}

fn dot(digits: &[u32], scale: &ConvergentTable) -> u64 {
    digits
        .iter()
        .zip(scale.q_values())
        .map(|(&d, &q)| d as u64 * q)
        .sum()
}

/// `q_i`, with `q_{K+1}` read from the table limit.
fn q_ext(scale: &ConvergentTable, i: usize) -> u64 {
    if i <= scale.max_index() {
        scale.q(i)
    } else {
        scale.limit()
    }
}

fn check_range(n: u64, scale: &ConvergentTable) -> Result<()> {
    if n >= scale.limit() {
        return Err(Error::Range(format!(
            "{n} >= scale limit {}",
            scale.limit()
        )));
    }
    Ok(())
}

/// Writes the greedy expansion of `rem < q_len` into `out[..len]`.
fn greedy_into(mut rem: u64, scale: &ConvergentTable, out: &mut [u32]) {
    for j in (0..out.len()).rev() {
        let q = scale.q(j);
        let d = rem / q;
        out[j] = d as u32;
        rem -= d * q;
    }
}

/// Greedy expansion of `n`.
pub fn encode(n: u64, scale: &ConvergentTable) -> Result<DigitString<'_>> {
    check_range(n, scale)?;
    let mut digits = vec![0; scale.digit_positions()];
    greedy_into(n, scale, &mut digits);
    trim(&mut digits);
    Ok(DigitString { digits, scale })
}

pub fn decode(d: &DigitString<'_>) -> u64 {
    d.value()
}

/// Decodes a raw digit array after validating it.
pub fn decode_digits(digits: &[u32], scale: &ConvergentTable) -> Result<u64> {
    DigitString::new(digits.to_vec(), scale).map(|d| d.value())
}

/// Whether `digits` is a legal expansion: `ε_0 < a_1`, `ε_k ≤ a_{k+1}`,
/// `ε_k = a_{k+1} ⇒ ε_{k−1} = 0`, and every partial sum below `q_{K'}` is
/// smaller than `q_{K'}`.
pub fn validate(digits: &[u32], scale: &ConvergentTable) -> bool {
    let positions = scale.digit_positions();
    for (k, &d) in digits.iter().enumerate() {
        if d == 0 {
            continue;
        }
        if k >= positions {
            return false;
        }
        let bound = scale
            .a(k + 1)
            .expect("quotient known for every digit position");
        if k == 0 {
            if d >= bound {
                return false;
            }
        } else if d > bound || (d == bound && digits[k - 1] != 0) {
            return false;
        }
    }
    let mut partial: u128 = 0;
    for (k, &d) in digits.iter().enumerate().take(positions) {
        if partial >= q_ext(scale, k) as u128 {
            return false;
        }
        partial += d as u128 * scale.q(k) as u128;
    }
    let top = digits.len().min(positions);
    partial < q_ext(scale, top) as u128
}

/// `σ_α(n) = Σ ε_k(n)`.
pub fn sigma(n: u64, scale: &ConvergentTable) -> Result<u64> {
    encode(n, scale).map(|d| d.sigma())
}

/// `ψ_λ(n) = Σ_{k<λ} ε_k(n) q_k`.
pub fn psi(n: u64, lambda: usize, scale: &ConvergentTable) -> Result<u64> {
    let d = encode(n, scale)?;
    let low = lambda.min(d.digits.len());
    Ok(dot(&d.digits[..low], scale))
}

/// Per-integer greedy expansions of `0..count`.
pub fn iterate(
    scale: &ConvergentTable,
    count: u64,
) -> Result<impl Iterator<Item = (u64, DigitString<'_>)> + '_> {
    if count > scale.limit() {
        return Err(Error::Range(format!(
            "{count} integers exceed scale limit {}",
            scale.limit()
        )));
    }
    Ok((0..count).map(move |n| (n, encode(n, scale).expect("n below limit"))))
}

/// Incremental enumeration of consecutive expansions.
///
/// Passing from `n` to `n + 1` keeps the digits at positions `≥ k` and
/// re-expands `ψ_k(n) + 1` below them, for the least `k` at which that value
/// is below `q_k` and the junction at `k` stays legal. The result is legal and
/// sums to `n + 1`, so it is the greedy expansion.
#[derive(Debug, Clone)]
pub struct Odometer<'a> {
    scale: &'a ConvergentTable,
    digits: Vec<u32>,
    len: usize,
    n: u64,
}

impl<'a> Odometer<'a> {
    pub fn new(scale: &'a ConvergentTable, start: u64) -> Result<Self> {
        check_range(start, scale)?;
        let mut digits = vec![0; scale.digit_positions()];
        greedy_into(start, scale, &mut digits);
        let len = digits.iter().rposition(|&d| d != 0).map_or(0, |i| i + 1);
        Ok(Self {
            scale,
            digits,
            len,
            n: start,
        })
    }

    pub fn value(&self) -> u64 {
        self.n
    }

    /// Current digits, trailing zeros trimmed.
    pub fn digits(&self) -> &[u32] {
        &self.digits[..self.len]
    }

    pub fn to_digit_string(&self) -> DigitString<'a> {
        DigitString {
            digits: self.digits().to_vec(),
            scale: self.scale,
        }
    }

    /// Moves to `n + 1`; returns false, leaving the state untouched, at the
    /// end of the representable range.
    pub fn advance(&mut self) -> bool {
        let scale = self.scale;
        if self.n + 1 >= scale.limit() {
            return false;
        }
        let positions = self.digits.len();
        let mut low = 1u64;
        let mut k = 0usize;
        loop {
            if k >= 1 {
                let dk = if k < positions { self.digits[k] } else { 0 };
                let junction_ok = k >= positions
                    || dk < scale.a(k + 1).expect("quotient for digit position")
                    || low < scale.q(k - 1);
                if low < q_ext(scale, k) && junction_ok {
                    break;
                }
            }
            low += self.digits[k] as u64 * scale.q(k);
            k += 1;
        }
        greedy_into(low, scale, &mut self.digits[..k]);
        if k >= self.len {
            self.len = self.digits[..k]
                .iter()
                .rposition(|&d| d != 0)
                .map_or(0, |i| i + 1);
        }
        self.n += 1;
        true
    }

    /// Calls `f(n, digits)` for `start..end`.
    pub fn for_each_in(
        scale: &'a ConvergentTable,
        start: u64,
        end: u64,
        mut f: impl FnMut(u64, &[u32]),
    ) -> Result<()> {
        if start >= end {
            return Ok(());
        }
        if end > scale.limit() {
            return Err(Error::Range(format!(
                "{end} exceeds scale limit {}",
                scale.limit()
            )));
        }
        let mut odo = Self::new(scale, start)?;
        loop {
            f(odo.n, odo.digits());
            if odo.n + 1 >= end {
                return Ok(());
            }
            odo.advance();
        }
    }
}

/// Whether the block starting at `w_i` has length `q_λ` or `q_{λ−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum GapKind {
    Long,
    Short,
}

/// Increasing enumeration `w_0 < w_1 < …` of the integers whose digits
/// `ε_0..ε_{λ−1}` vanish; `kinds[i]` classifies the gap `w_{i+1} − w_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockIndex {
    pub lambda: usize,
    pub starts: Vec<u64>,
    pub kinds: Vec<GapKind>,
}

/// Walks block starts gap by gap: the gap after `w` is `q_{λ−1}` exactly when
/// `ε_λ(w) = a_{λ+1}`, otherwise `q_λ`.
#[derive(Debug, Clone)]
pub struct BlockWalker<'a> {
    scale: &'a ConvergentTable,
    lambda: usize,
    long: u64,
    short: u64,
    full: u32,
    next: u64,
}

impl<'a> BlockWalker<'a> {
    pub fn new(scale: &'a ConvergentTable, lambda: usize) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::Range("block structure needs lambda >= 1".into()));
        }
        let full = scale.a(lambda + 1).ok_or_else(|| {
            Error::Range(format!(
                "scale does not reach a_{} for lambda = {lambda}",
                lambda + 1
            ))
        })?;
        Ok(Self {
            scale,
            lambda,
            long: scale.q(lambda),
            short: scale.q(lambda - 1),
            full,
            next: 0,
        })
    }

    /// The next block as `(start, kind, length)`.
    pub fn next_block(&mut self) -> Result<(u64, GapKind, u64)> {
        let w = self.next;
        let eps = encode(w, self.scale)
            .map_err(|_| Error::Range(format!("block start {w} beyond the scale")))?
            .digit(self.lambda);
        let (kind, len) = if eps == self.full {
            (GapKind::Short, self.short)
        } else {
            (GapKind::Long, self.long)
        };
        self.next = w.checked_add(len).ok_or(Error::Overflow {
            index: self.lambda,
            largest_safe: self.lambda,
        })?;
        Ok((w, kind, len))
    }
}

/// The first `count` block starts for truncation level `λ`.
pub fn w_sequence(lambda: usize, count: usize, scale: &ConvergentTable) -> Result<BlockIndex> {
    if count == 0 {
        return Err(Error::Range("w_sequence needs count >= 1".into()));
    }
    let mut walker = BlockWalker::new(scale, lambda)?;
    let mut starts = Vec::with_capacity(count);
    let mut kinds = Vec::with_capacity(count - 1);
    for i in 0..count {
        if i + 1 < count {
            let (w, kind, _) = walker.next_block()?;
            starts.push(w);
            kinds.push(kind);
        } else {
            starts.push(walker.next);
        }
    }
    Ok(BlockIndex {
        lambda,
        starts,
        kinds,
    })
}

/// Counts of Long (`a`) and Short (`b`) blocks lying entirely below `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDensities {
    pub long_count: u64,
    pub short_count: u64,
    pub long_frac: f64,
    pub short_frac: f64,
}

pub fn block_densities(lambda: usize, n: u64, scale: &ConvergentTable) -> Result<BlockDensities> {
    let mut walker = BlockWalker::new(scale, lambda)?;
    if n < scale.q(lambda) {
        return Err(Error::Range(format!(
            "block_densities needs N >= q_{lambda}"
        )));
    }
    let (mut a, mut b) = (0u64, 0u64);
    loop {
        let (w, kind, len) = walker.next_block()?;
        if w + len > n {
            break;
        }
        match kind {
            GapKind::Long => a += 1,
            GapKind::Short => b += 1,
        }
    }
    Ok(BlockDensities {
        long_count: a,
        short_count: b,
        long_frac: a as f64 / n as f64,
        short_frac: b as f64 / n as f64,
    })
}
