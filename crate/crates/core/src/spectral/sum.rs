//! Fixed-order pairwise summation.
//!
//! The reduction tree depends only on the length: ranges above
//! [`BASE_BLOCK`] split at their midpoint, and base blocks accumulate into
//! four interleaved lanes combined as `(l0 + l1) + (l2 + l3)`. Work above
//! [`PARALLEL_THRESHOLD`] is forked with `rayon::join` along the same tree,
//! so results are bit-identical for every worker count.

use std::ops::Add;

pub const BASE_BLOCK: usize = 256;
pub const PARALLEL_THRESHOLD: usize = 1 << 16;

const LANES: usize = 4;

pub fn pairwise_sum<T, F>(len: usize, term: F) -> T
where
    T: Copy + Default + Send + Add<Output = T>,
    F: Fn(usize) -> T + Sync,
{
    range_sum(0, len, &term)
}

pub fn pairwise_sum_slice<T>(xs: &[T]) -> T
where
    T: Copy + Default + Send + Sync + Add<Output = T>,
{
    pairwise_sum(xs.len(), |i| xs[i])
}

fn range_sum<T, F>(lo: usize, hi: usize, term: &F) -> T
where
    T: Copy + Default + Send + Add<Output = T>,
    F: Fn(usize) -> T + Sync,
{
    let len = hi - lo;
    if len <= BASE_BLOCK {
        return block_sum(lo, hi, term);
    }
    let mid = lo + len / 2;
    let (a, b) = if len >= PARALLEL_THRESHOLD {
        rayon::join(|| range_sum(lo, mid, term), || range_sum(mid, hi, term))
    } else {
        (range_sum(lo, mid, term), range_sum(mid, hi, term))
    };
    a + b
}

#[inline]
fn block_sum<T, F>(lo: usize, hi: usize, term: &F) -> T
where
    T: Copy + Default + Add<Output = T>,
    F: Fn(usize) -> T,
{
    let mut lanes = [T::default(); LANES];
    let mut i = lo;
    while i + LANES <= hi {
        for (j, lane) in lanes.iter_mut().enumerate() {
            *lane = *lane + term(i + j);
        }
        i += LANES;
    }
    for (j, lane) in lanes.iter_mut().enumerate().take(hi - i) {
        *lane = *lane + term(i + j);
    }
    (lanes[0] + lanes[1]) + (lanes[2] + lanes[3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn exact_on_integers() {
        for len in [0usize, 1, 3, 255, 256, 257, 1000, 100_000] {
            let s: f64 = pairwise_sum(len, |i| i as f64);
            assert_eq!(s, (len * len.saturating_sub(1) / 2) as f64);
        }
    }

    #[test]
    fn independent_of_thread_count() {
        let xs: Vec<Complex64> = (0..300_001)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos() / 3.0))
            .collect();
        let reference = pairwise_sum_slice(&xs);
        for threads in [1, 2, 3] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let got = pool.install(|| pairwise_sum_slice(&xs));
            assert_eq!(got, reference);
        }
    }

    #[test]
    fn more_accurate_than_naive() {
        let n = 1_000_000;
        let s: f64 = pairwise_sum(n, |_| 0.1);
        assert!((s - 100_000.0).abs() < 1e-9);
    }
}
