//! Segmented factorization machinery shared by the census and the
//! rough-number diagnostics. Each segment is sieved with the base primes
//! `<= sqrt(x_max)`; whatever残 remains after extraction is a single prime
//! above the base range.

use crate::numeric::primes_up_to;

/// Distinct base-prime slots per position. The product of the 10 smallest
/// primes exceeds 6e9, so 9 slots plus the residual cover all n <= 1e9.
pub(crate) const MAX_FACTORS: usize = 9;

/// Base primes needed to factor every n <= x_max segment by segment.
pub(crate) fn base_primes(x_max: u64) -> Vec<u32> {
    let mut r = 1u64;
    while (r + 1) * (r + 1) <= x_max {
        r += 1;
    }
    primes_up_to(r).into_iter().map(|p| p as u32).collect()
}

/// Reusable per-worker factor buffers for one segment.
pub(crate) struct SegmentFactors {
    size: usize,
    rem: Vec<u64>,
    nfac: Vec<u8>,
    primes: Vec<u32>,
    exps: Vec<u8>,
}

impl SegmentFactors {
    pub fn new(size: usize) -> Self {
        SegmentFactors {
            size,
            rem: vec![0; size],
            nfac: vec![0; size],
            primes: vec![0; size * MAX_FACTORS],
            exps: vec![0; size * MAX_FACTORS],
        }
    }

    /// Sieve the factorizations of `[lo, hi]` (requires `hi - lo < size`, `lo >= 1`).
    pub fn load(&mut self, lo: u64, hi: u64, base: &[u32]) {
        let len = (hi - lo + 1) as usize;
        assert!(len <= self.size && lo >= 1);
        for i in 0..len {
            self.rem[i] = lo + i as u64;
            self.nfac[i] = 0;
        }
        for &p in base {
            let p = p as u64;
            if p > hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            while m <= hi {
                let idx = (m - lo) as usize;
                let mut r = self.rem[idx];
                let mut e = 0u8;
                while r.is_multiple_of(p) {
                    r /= p;
                    e += 1;
                }
                self.rem[idx] = r;
                let k = self.nfac[idx] as usize;
                self.primes[idx * MAX_FACTORS + k] = p as u32;
                self.exps[idx * MAX_FACTORS + k] = e;
                self.nfac[idx] = (k + 1) as u8;
                m += p;
            }
        }
    }

    /// Visit `(n, factors)` for every n in the loaded segment, factors in
    /// increasing prime order.
    pub fn for_each(&self, lo: u64, hi: u64, mut f: impl FnMut(u64, &[(u64, u32)])) {
        let len = (hi - lo + 1) as usize;
        let mut buf = [(0u64, 0u32); MAX_FACTORS + 1];
        for i in 0..len {
            let mut k = self.nfac[i] as usize;
            #[allow(clippy::needless_range_loop)] // two parallel flat arrays
            for j in 0..k {
                buf[j] = (
                    self.primes[i * MAX_FACTORS + j] as u64,
                    self.exps[i * MAX_FACTORS + j] as u32,
                );
            }
            let r = self.rem[i];
            if r > 1 {
                buf[k] = (r, 1);
                k += 1;
            }
            f(lo + i as u64, &buf[..k]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{build_spf_table, factorize};

    #[test]
    fn segment_matches_spf_factorization() {
        let table = build_spf_table(60_000).unwrap();
        let base = base_primes(60_000);
        let mut seg = SegmentFactors::new(1000);
        for lo in [1u64, 999, 30_011, 59_001] {
            let hi = lo + 999;
            seg.load(lo, hi, &base);
            seg.for_each(lo, hi, |n, facs| {
                let expected = factorize(n, &table).unwrap();
                assert_eq!(facs, expected.factors(), "n={n}");
            });
        }
    }

    #[test]
    fn base_primes_bound() {
        assert_eq!(base_primes(100), vec![2, 3, 5, 7]);
        assert_eq!(base_primes(99), vec![2, 3, 5, 7]);
        assert_eq!(base_primes(120), vec![2, 3, 5, 7]);
        assert_eq!(base_primes(121), vec![2, 3, 5, 7, 11]);
    }
}
