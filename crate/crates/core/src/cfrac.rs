//! Continued fractions `α = [0; a_1, a_2, …]` given by their partial quotients,
//! the convergent table `p_i / q_i`, and tail values `[0; a_{λ+1}, a_{λ+2}, …]`.
//!
//! The denominators `q_i` are the scale of the Ostrowski numeration system.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest denominator a table may hold.
pub const MAX_DENOMINATOR: u64 = i64::MAX as u64;

/// Default number of quotients used when evaluating a tail.
pub const DEFAULT_TAIL_DEPTH: usize = 40;

/// Partial quotients `a_1, a_2, …` as a preperiod followed by a repeating period.
///
/// An empty period means the quotients form a finite explicit list; indexing
/// past its end is an [`Error::Index`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientSpec {
    preperiod: Vec<u32>,
    period: Vec<u32>,
}

impl QuotientSpec {
    pub fn new(preperiod: Vec<u32>, period: Vec<u32>) -> Result<Self> {
        if preperiod.is_empty() && period.is_empty() {
            return Err(Error::Parse(
                "quotient spec needs at least one quotient".into(),
            ));
        }
        if preperiod.iter().chain(&period).any(|&a| a == 0) {
            return Err(Error::Parse("partial quotients must be positive".into()));
        }
        Ok(Self { preperiod, period })
    }

    /// `[0; 1, 1, 1, …]`, the golden ratio conjugate (Zeckendorf numeration).
    pub fn golden() -> Self {
        Self {
            preperiod: vec![],
            period: vec![1],
        }
    }

    /// `[0; 2, 2, 2, …] = √2 − 1`.
    pub fn silver() -> Self {
        Self {
            preperiod: vec![],
            period: vec![2],
        }
    }

    pub fn periodic(preperiod: Vec<u32>, period: Vec<u32>) -> Result<Self> {
        Self::new(preperiod, period)
    }

    /// A finite explicit list of quotients.
    pub fn list(quotients: Vec<u32>) -> Result<Self> {
        Self::new(quotients, vec![])
    }

    pub fn preperiod(&self) -> &[u32] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u32] {
        &self.period
    }

    /// Whether quotients are available at every index.
    pub fn extends_indefinitely(&self) -> bool {
        !self.period.is_empty()
    }

    /// The partial quotient `a_i`, for `i ≥ 1`.
    pub fn quotient(&self, i: usize) -> Result<u32> {
        if i == 0 {
            return Err(Error::Range("partial quotients are indexed from 1".into()));
        }
        let j = i - 1;
        if j < self.preperiod.len() {
            return Ok(self.preperiod[j]);
        }
        if self.period.is_empty() {
            return Err(Error::Index {
                index: i,
                available: self.preperiod.len(),
            });
        }
        let off = (j - self.preperiod.len()) % self.period.len();
        Ok(self.period[off])
    }

    /// The spec of `[0; a_{shift+1}, a_{shift+2}, …]`.
    pub fn shifted(&self, shift: usize) -> Result<Self> {
        if shift < self.preperiod.len() {
            return Self::new(self.preperiod[shift..].to_vec(), self.period.clone());
        }
        if self.period.is_empty() {
            return Err(Error::Index {
                index: shift + 1,
                available: self.preperiod.len(),
            });
        }
        let rot = (shift - self.preperiod.len()) % self.period.len();
        let mut period = self.period[rot..].to_vec();
        period.extend_from_slice(&self.period[..rot]);
        Self::new(vec![], period)
    }
}

fn join(xs: &[u32]) -> String {
    xs.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn parse_list(s: &str) -> Result<Vec<u32>> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|e| Error::Parse(format!("bad partial quotient {t:?}: {e}")))
        })
        .collect()
}

impl FromStr for QuotientSpec {
    type Err = Error;

    /// Grammar: `golden`, `silver`, `periodic:<a,b,…>/<c,d,…>`, `list:<a,b,…>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "golden" => return Ok(Self::golden()),
            "silver" => return Ok(Self::silver()),
            _ => {}
        }
        if let Some(body) = s.strip_prefix("periodic:") {
            let (pre, per) = body
                .split_once('/')
                .ok_or_else(|| Error::Parse(format!("periodic spec needs '/': {s:?}")))?;
            return Self::new(parse_list(pre)?, parse_list(per)?);
        }
        if let Some(body) = s.strip_prefix("list:") {
            return Self::list(parse_list(body)?);
        }
        Err(Error::Parse(format!("unknown alpha spec {s:?}")))
    }
}

impl fmt::Display for QuotientSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::golden() {
            f.write_str("golden")
        } else if *self == Self::silver() {
            f.write_str("silver")
        } else if self.period.is_empty() {
            write!(f, "list:{}", join(&self.preperiod))
        } else {
            write!(
                f,
                "periodic:{}/{}",
                join(&self.preperiod),
                join(&self.period)
            )
        }
    }
}

/// Convergents `p_i / q_i` for `0 ≤ i ≤ K`.
///
/// When `a_{K+1}` is known the table also carries it, so integers up to
/// `q_{K+1} − 1` (digits `ε_0..ε_K`) are representable. Otherwise the usable
/// range stops at `q_K − 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentTable {
    quotients: Vec<u32>,
    next_quotient: Option<u32>,
    p: Vec<u64>,
    q: Vec<u64>,
    limit: u64,
}

/// Builds the convergent table up to index `k`.
pub fn expand(spec: &QuotientSpec, k: usize) -> Result<ConvergentTable> {
    if k == 0 {
        return Err(Error::Range("convergent table needs K >= 1".into()));
    }
    let mut quotients = Vec::with_capacity(k);
    let mut p = vec![0u64, 1];
    let mut q = vec![1u64];
    let a1 = spec.quotient(1)?;
    quotients.push(a1);
    q.push(a1 as u64);
    for i in 2..=k {
        let a = spec.quotient(i)?;
        quotients.push(a);
        let step = |x: &[u64]| -> Option<u64> {
            (a as u64)
                .checked_mul(x[i - 1])?
                .checked_add(x[i - 2])
                .filter(|&v| v <= MAX_DENOMINATOR)
        };
        let qi = step(&q).ok_or(Error::Overflow {
            index: i,
            largest_safe: i - 1,
        })?;
        let pi = step(&p).ok_or(Error::Overflow {
            index: i,
            largest_safe: i - 1,
        })?;
        p.push(pi);
        q.push(qi);
    }
    let next_quotient = match spec.quotient(k + 1) {
        Ok(a) => Some(a),
        Err(Error::Index { .. }) => None,
        Err(e) => return Err(e),
    };
    let limit = match next_quotient {
        Some(a) => (a as u64)
            .checked_mul(q[k])
            .and_then(|v| v.checked_add(q[k - 1]))
            .map_or(MAX_DENOMINATOR + 1, |v| v.min(MAX_DENOMINATOR + 1)),
        None => q[k],
    };
    Ok(ConvergentTable {
        quotients,
        next_quotient,
        p,
        q,
        limit,
    })
}

/// Smallest table whose representable range contains `0..=n_max`.
pub fn covering(spec: &QuotientSpec, n_max: u64) -> Result<ConvergentTable> {
    let mut k = 1;
    loop {
        let t = expand(spec, k)?;
        if t.limit() > n_max {
            return Ok(t);
        }
        if t.next_quotient.is_none() {
            return Err(Error::Range(format!(
                "{n_max} exceeds the range of the explicit quotient list ({})",
                t.limit()
            )));
        }
        k += 1;
    }
}

impl ConvergentTable {
    /// The maximum convergent index `K`.
    pub fn max_index(&self) -> usize {
        self.q.len() - 1
    }

    pub fn p(&self, i: usize) -> u64 {
        self.p[i]
    }

    pub fn q(&self, i: usize) -> u64 {
        self.q[i]
    }

    pub fn p_values(&self) -> &[u64] {
        &self.p
    }

    pub fn q_values(&self) -> &[u64] {
        &self.q
    }

    /// The quotients `a_1..a_K` used to build the table.
    pub fn quotients(&self) -> &[u32] {
        &self.quotients
    }

    /// `a_i` for `1 ≤ i ≤ K + 1`, if known.
    pub fn a(&self, i: usize) -> Option<u32> {
        match i {
            0 => None,
            i if i <= self.quotients.len() => Some(self.quotients[i - 1]),
            i if i == self.quotients.len() + 1 => self.next_quotient,
            _ => None,
        }
    }

    /// Number of digit positions `ε_0, ε_1, …` the table can express.
    pub fn digit_positions(&self) -> usize {
        if self.next_quotient.is_some() {
            self.q.len()
        } else {
            self.q.len() - 1
        }
    }

    /// Exclusive upper end of the representable integers.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// `q_{K+1}`, when it is known and fits.
    pub fn next_denominator(&self) -> Option<u64> {
        self.next_quotient
            .filter(|_| self.limit <= MAX_DENOMINATOR)
            .map(|_| self.limit)
    }

    /// `p_i q_{i−1} − p_{i−1} q_i`, which alternates between `±1`.
    pub fn determinant(&self, i: usize) -> i128 {
        self.p[i] as i128 * self.q[i - 1] as i128 - self.p[i - 1] as i128 * self.q[i] as i128
    }
}

/// A real number with a rigorous bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailValue {
    pub value: f64,
    pub error_bound: f64,
}

/// `α ≈ p_depth / q_depth` with error at most `1 / (q_depth q_{depth+1})`
/// plus rounding.
pub fn alpha_value(spec: &QuotientSpec, depth: usize) -> Result<TailValue> {
    if depth < 2 {
        return Err(Error::Range("alpha_value needs depth >= 2".into()));
    }
    let t = expand(spec, depth)?;
    let q_next = match t.next_quotient {
        Some(_) => t.limit as f64,
        None => {
            return Err(Error::Index {
                index: depth + 1,
                available: spec.preperiod.len(),
            });
        }
    };
    let (p, q) = (t.p(depth) as f64, t.q(depth) as f64);
    let value = p / q;
    Ok(TailValue {
        value,
        error_bound: 1.0 / (q * q_next) + 4.0 * f64::EPSILON * value,
    })
}

/// `[0; a_{λ+1}, a_{λ+2}, …]` from `depth` quotients by backward evaluation.
///
/// The innermost remainder is taken as `1/2`, which places the estimate
/// strictly between the shifted convergents of orders `depth − 1` and `depth`
/// and keeps it within `1 / (q'_d (q'_d + q'_{d−1}))` of the true tail.
pub fn tail(spec: &QuotientSpec, lambda: usize, depth: usize) -> Result<TailValue> {
    if depth == 0 {
        return Err(Error::Range("tail needs depth >= 1".into()));
    }
    let quotients = (lambda + 1..=lambda + depth)
        .map(|i| spec.quotient(i))
        .collect::<Result<Vec<_>>>()?;

    let mut x = 0.5;
    for &a in quotients.iter().rev() {
        x = 1.0 / (a as f64 + x);
    }

    // Denominators of the shifted fraction, in floating point since only
    // their size matters for the bound.
    let (mut q_prev, mut q_cur) = (1.0f64, quotients[0] as f64);
    for &a in &quotients[1..] {
        let q_new = a as f64 * q_cur + q_prev;
        q_prev = q_cur;
        q_cur = q_new;
    }
    let error_bound = 1.0 / (q_cur * (q_cur + q_prev)) + 8.0 * f64::EPSILON;
    Ok(TailValue {
        value: x,
        error_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_and_silver_denominators() {
        let g = expand(&QuotientSpec::golden(), 4).unwrap();
        assert_eq!(g.q_values(), &[1, 1, 2, 3, 5]);
        let s = expand(&QuotientSpec::silver(), 4).unwrap();
        assert_eq!(s.q_values(), &[1, 2, 5, 12, 29]);
    }

    #[test]
    fn base_case() {
        let t = expand(&QuotientSpec::golden(), 1).unwrap();
        assert_eq!(t.p_values(), &[0, 1]);
        assert_eq!(t.q_values(), &[1, 1]);
        assert_eq!(t.determinant(1), 1);
    }

    #[test]
    fn determinant_alternates() {
        for spec in [
            "golden",
            "silver",
            "periodic:3/1,2",
            "periodic:/1,2,3,1,1,4",
        ] {
            let spec: QuotientSpec = spec.parse().unwrap();
            let t = expand(&spec, 30).unwrap();
            for i in 1..=30 {
                let expected = if i % 2 == 1 { 1 } else { -1 };
                assert_eq!(t.determinant(i), expected, "{spec} i={i}");
            }
        }
    }

    #[test]
    fn overflow_reports_largest_safe_index() {
        let err = expand(&QuotientSpec::golden(), 200).unwrap_err();
        // F(92) is the largest Fibonacci number below 2^63; q_i = F(i+1).
        assert_eq!(
            err,
            Error::Overflow {
                index: 92,
                largest_safe: 91
            }
        );
        let t = expand(&QuotientSpec::golden(), 91).unwrap();
        assert_eq!(t.q(91), 7_540_113_804_746_346_429);
    }

    #[test]
    fn explicit_list_exhaustion() {
        let spec = QuotientSpec::list(vec![2]).unwrap();
        assert!(matches!(
            expand(&spec, 2),
            Err(Error::Index { index: 2, .. })
        ));
        assert!(matches!(alpha_value(&spec, 2), Err(Error::Index { .. })));
        let t = expand(&spec, 1).unwrap();
        assert_eq!(t.limit(), 2);
        assert_eq!(t.digit_positions(), 1);
    }

    #[test]
    fn alpha_values() {
        let g = alpha_value(&QuotientSpec::golden(), 40).unwrap();
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        assert!((g.value - phi).abs() < 1e-15);
        assert!(g.error_bound < 1e-15);
        let s = alpha_value(&QuotientSpec::silver(), 40).unwrap();
        assert!((s.value - (2f64.sqrt() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn tails() {
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let t = tail(&QuotientSpec::golden(), 2, 40).unwrap();
        assert!((t.value - phi).abs() < 1e-12);
        assert!(t.error_bound < 1e-12);
        let t = tail(&QuotientSpec::silver(), 5, 40).unwrap();
        assert!((t.value - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        let spec = QuotientSpec::periodic(vec![3], vec![1]).unwrap();
        let t = tail(&spec, 1, 40).unwrap();
        assert!((t.value - phi).abs() < 1e-12);
        let t = tail(&spec, 0, 40).unwrap();
        assert!((t.value - 1.0 / (3.0 + phi)).abs() < 1e-12);
    }

    #[test]
    fn tail_lies_between_shifted_convergents() {
        for spec in [
            "golden",
            "silver",
            "periodic:3/1,2",
            "periodic:/1,2,3,1,1,4",
        ] {
            let spec: QuotientSpec = spec.parse().unwrap();
            for lambda in 0..6 {
                let shifted = spec.shifted(lambda).unwrap();
                for d in 2..10 {
                    let t = tail(&spec, lambda, d).unwrap();
                    let c = expand(&shifted, d).unwrap();
                    let lo = c.p(d - 1) as f64 / c.q(d - 1) as f64;
                    let hi = c.p(d) as f64 / c.q(d) as f64;
                    let (lo, hi) = if lo < hi { (lo, hi) } else { (hi, lo) };
                    assert!(lo < t.value && t.value < hi, "{spec} λ={lambda} d={d}");
                }
            }
        }
    }

    #[test]
    fn spec_grammar_round_trips() {
        for s in [
            "golden",
            "silver",
            "periodic:3/1",
            "periodic:/1,2",
            "list:1,2,3",
        ] {
            let spec: QuotientSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert_eq!(
            "periodic:/1".parse::<QuotientSpec>().unwrap(),
            QuotientSpec::golden()
        );
        assert!("list:1,0".parse::<QuotientSpec>().is_err());
        assert!("periodic:/".parse::<QuotientSpec>().is_err());
        assert!("bronze".parse::<QuotientSpec>().is_err());
    }

    #[test]
    fn shifted_rotates_period() {
        let spec: QuotientSpec = "periodic:5/1,2,3".parse().unwrap();
        let s = spec.shifted(2).unwrap();
        assert_eq!(s.period(), &[2, 3, 1]);
        for i in 1..10 {
            assert_eq!(s.quotient(i).unwrap(), spec.quotient(i + 2).unwrap());
        }
    }
}
