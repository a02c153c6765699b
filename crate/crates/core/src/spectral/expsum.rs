//! Exponential sums `(1/N) Σ_{n<N} g(n) e(−nβ)`, their recurrence along the
//! convergent denominators, and the grid-plus-refinement scan for the
//! supremum over `β`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::sum::pairwise_sum;
use crate::alphafun::AlphaFunction;
use crate::error::{Error, Result};
use crate::phase;

/// Chunk length of the phase table in [`ExpSumEvaluator`].
const CHUNK: usize = 1024;

/// Default number of grid points for [`spectrum_scan`].
pub const DEFAULT_GRID: usize = 4096;

/// Peaks refined after the grid pass.
pub const REFINED_PEAKS: usize = 5;

/// Width at which ternary refinement stops.
pub const REFINE_WIDTH: f64 = 1e-6;

pub fn exponential_sum(g: &AlphaFunction, beta: f64, n: u64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Range("exponential_sum needs N >= 1".into()));
    }
    let values = g.values(0, n as usize)?;
    Ok(pairwise_sum(values.len(), |i| {
        values[i] * phase::e_neg_mul(i as u64, beta)
    }) / n as f64)
}

/// Repeated evaluation of `(1/N) Σ_{n<N} x_n e(−nβ)` for fixed `x`.
///
/// Phases are built as `e(−cβ) · e(−jβ)` with `c` a multiple of the chunk
/// length and `j < CHUNK`; both factors come from exactly reduced arguments.
#[derive(Debug, Clone)]
pub struct ExpSumEvaluator {
    values: Vec<Complex64>,
}

impl ExpSumEvaluator {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn from_function(g: &AlphaFunction, n: u64) -> Result<Self> {
        Ok(Self::new(g.values(0, n as usize)?))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn eval(&self, beta: f64) -> Complex64 {
        let n = self.values.len();
        let inner: Vec<Complex64> = (0..CHUNK.min(n))
            .map(|j| phase::e_neg_mul(j as u64, beta))
            .collect();
        let outer: Vec<Complex64> = (0..n.div_ceil(CHUNK))
            .map(|c| phase::e_neg_mul((c * CHUNK) as u64, beta))
            .collect();
        let values = &self.values;
        pairwise_sum(n, |i| values[i] * (outer[i / CHUNK] * inner[i % CHUNK])) / n as f64
    }

    pub fn magnitude(&self, beta: f64) -> f64 {
        self.eval(beta).norm()
    }

    /// `|(1/N) Σ x_n e(−n j / M)|` for `j < M`, by folding modulo `M` and one
    /// length-`M` FFT.
    pub fn grid(&self, m: usize) -> Vec<f64> {
        let mut bins = vec![Complex64::default(); m];
        for (i, &v) in self.values.iter().enumerate() {
            bins[i % m] += v;
        }
        FftPlanner::new().plan_fft_forward(m).process(&mut bins);
        let n = self.values.len() as f64;
        bins.iter().map(|z| z.norm() / n).collect()
    }
}

/// `S_0, …, S_K` with `S_i = (1/q_i) Σ_{n<q_i} g(n) e(−nβ)`, from
/// `S_{i+1} = (q_i/q_{i+1}) (Σ_{b<a_{i+1}} h(b q_i)) S_i + (q_{i−1}/q_{i+1}) h(a_{i+1} q_i) S_{i−1}`
/// where `h = g · e(−·β)`.
pub fn scale_sums(g: &AlphaFunction, beta: f64, k: usize) -> Result<Vec<Complex64>> {
    let scale = g.scale();
    if k == 0 || k > scale.max_index() {
        return Err(Error::Range(format!(
            "scale_sums needs 1 <= K <= {}",
            scale.max_index()
        )));
    }
    let h = g.twist(beta);
    let q1 = scale.q(1);
    let seed = h.values(0, q1 as usize)?.into_iter().sum::<Complex64>() / q1 as f64;
    let mut s = Vec::with_capacity(k + 1);
    s.push(Complex64::new(1.0, 0.0));
    s.push(seed);
    for i in 1..k {
        let a = scale.a(i + 1).expect("quotient inside the table");
        let (q_prev, q, q_next) = (
            scale.q(i - 1) as f64,
            scale.q(i) as f64,
            scale.q(i + 1) as f64,
        );
        let lead: Complex64 = (0..a).map(|b| h.atom(i, b)).sum();
        let next = lead * s[i] * (q / q_next) + h.atom(i, a) * s[i - 1] * (q_prev / q_next);
        s.push(next);
    }
    Ok(s)
}

/// Result of [`spectrum_scan`]; `profile[j]` is the grid value at `β = j / M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumScan {
    pub beta_peak: f64,
    pub peak_value: f64,
    pub profile: Vec<f64>,
}

/// Estimates `sup_β |(1/N) Σ_{n<N} g(n) e(−nβ)|`.
pub fn spectrum_scan(g: &AlphaFunction, n: u64, grid_size: usize) -> Result<SpectrumScan> {
    if grid_size < 16 {
        return Err(Error::Range("spectrum_scan needs grid_size >= 16".into()));
    }
    if n == 0 {
        return Err(Error::Range("spectrum_scan needs N >= 1".into()));
    }
    let eval = ExpSumEvaluator::from_function(g, n)?;
    Ok(scan_evaluator(&eval, grid_size))
}

pub fn scan_evaluator(eval: &ExpSumEvaluator, grid_size: usize) -> SpectrumScan {
    let profile = eval.grid(grid_size);
    let m = grid_size;
    let step = 1.0 / m as f64;

    // Local maxima of the circular grid, strongest first.
    let mut peaks: Vec<usize> = (0..m)
        .filter(|&j| {
            let left = profile[(j + m - 1) % m];
            let right = profile[(j + 1) % m];
            profile[j] >= left && profile[j] >= right
        })
        .collect();
    peaks.sort_by(|&a, &b| profile[b].total_cmp(&profile[a]).then(a.cmp(&b)));
    peaks.truncate(REFINED_PEAKS);

    let mut best = (0.0, profile[0]);
    for (j, &v) in profile.iter().enumerate() {
        if v > best.1 {
            best = (j as f64 * step, v);
        }
    }
    for &j in &peaks {
        let center = j as f64 * step;
        let (mut lo, mut hi) = (center - step, center + step);
        while hi - lo > REFINE_WIDTH {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if eval.magnitude(m1) < eval.magnitude(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        let beta = 0.5 * (lo + hi);
        let v = eval.magnitude(beta);
        if v > best.1 {
            best = (phase::frac(beta), v);
        }
    }
    SpectrumScan {
        beta_peak: best.0,
        peak_value: best.1,
        profile,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfrac::{covering, QuotientSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table(spec: &str, n: u64) -> crate::cfrac::ConvergentTable {
        covering(&spec.parse::<QuotientSpec>().unwrap(), n).unwrap()
    }

    #[test]
    fn examples() {
        let one = AlphaFunction::one(table("golden", 1000));
        assert_eq!(
            exponential_sum(&one, 0.0, 100).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert!(exponential_sum(&one, 0.5, 2).unwrap().norm() < 1e-15);
        let g = AlphaFunction::from_theta(0.5, table("golden", 1000));
        assert!(exponential_sum(&g, 0.0, 2).unwrap().norm() < 1e-15);
    }

    #[test]
    fn evaluator_matches_direct() {
        let g = AlphaFunction::from_theta(0.1234567, table("silver", 100_000));
        let eval = ExpSumEvaluator::from_function(&g, 50_000).unwrap();
        for beta in [0.0, 0.3, 0.41421356, 0.999, -0.25] {
            let a = eval.eval(beta);
            let b = exponential_sum(&g, beta, 50_000).unwrap();
            assert!((a - b).norm() < 1e-13, "β={beta}");
        }
        let grid = eval.grid(64);
        for (j, v) in grid.iter().enumerate() {
            assert!((v - eval.magnitude(j as f64 / 64.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn scale_sums_examples() {
        let one = AlphaFunction::one(table("golden", 1 << 20));
        for s in scale_sums(&one, 0.0, 20).unwrap() {
            assert!((s - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
        let g = AlphaFunction::from_theta(0.5, table("golden", 1 << 20));
        let s = scale_sums(&g, 0.0, 3).unwrap();
        assert!((s[1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(s[2].norm() < 1e-15);
        assert!((s[3] - Complex64::new(-1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn scale_sums_match_direct_and_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for spec in ["golden", "silver", "periodic:2/1,3"] {
            let scale = table(spec, 200_000);
            for _ in 0..5 {
                let theta: f64 = rng.random();
                let beta: f64 = rng.random();
                let g = AlphaFunction::from_theta(theta, scale.clone());
                let k = (0..=scale.max_index())
                    .rev()
                    .find(|&i| scale.q(i) <= 100_000)
                    .unwrap();
                let s = scale_sums(&g, beta, k).unwrap();
                for (i, si) in s.iter().enumerate().skip(1) {
                    let direct = exponential_sum(&g, beta, scale.q(i)).unwrap();
                    let err = (si - direct).norm();
                    assert!(
                        err <= 1e-9 * direct.norm().max(1e-300) || err < 1e-15,
                        "{spec} i={i}"
                    );
                }
                for i in 1..k {
                    assert!(s[i + 1].norm() <= s[i].norm().max(s[i - 1].norm()) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn spectrum_of_constant_peaks_at_zero() {
        let one = AlphaFunction::one(table("golden", 100_000));
        let scan = spectrum_scan(&one, 10_000, 64).unwrap();
        assert!(scan.beta_peak.min(1.0 - scan.beta_peak) < 1e-9);
        assert!((scan.peak_value - 1.0).abs() < 1e-12);
        assert!(spectrum_scan(&one, 100, 8).is_err());
    }

    #[test]
    fn spectrum_of_pure_phase() {
        let h = AlphaFunction::one(table("silver", 100_000)).twist(0.3);
        let scan = spectrum_scan(&h, 50_000, 256).unwrap();
        assert!((scan.beta_peak - 0.7).abs() < 1e-4, "{}", scan.beta_peak);
        assert!((scan.peak_value - 1.0).abs() < 1e-3);
    }
}
