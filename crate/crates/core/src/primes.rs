//! Prime enumeration by segmented sieve, and deterministic primality testing.

use thiserror::Error;

use crate::modmath::Montgomery64;

/// Exclusive ceiling for `primes_in_range`.
pub const SIEVE_CEILING: u64 = 1 << 52;

/// Default window, in integers, for one sieve segment.
pub const DEFAULT_SEGMENT_WIDTH: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrimeError {
    #[error("range end {hi} exceeds the sieve ceiling 2^52")]
    RangeTooLarge { hi: u64 },
    #[error("empty range [{lo}, {hi})")]
    EmptyRange { lo: u64, hi: u64 },
}

/// The complete, ordered list of primes in `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSegment {
    pub lo: u64,
    pub hi: u64,
    pub primes: Vec<u64>,
}

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// Simple sieve of Eratosthenes returning all primes `<= limit`.
fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// A segmented sieve whose base-prime table covers every range ending at or
/// below `hi_max`. The table is built once and then only read.
#[derive(Debug, Clone)]
pub struct SegmentedSieve {
    hi_max: u64,
    // odd base primes up to isqrt(hi_max - 1)
    base: Vec<u64>,
}

impl SegmentedSieve {
    pub fn new(hi_max: u64) -> Result<Self, PrimeError> {
        if hi_max > SIEVE_CEILING {
            return Err(PrimeError::RangeTooLarge { hi: hi_max });
        }
        let base = small_primes(isqrt(hi_max.saturating_sub(1)))
            .into_iter()
            .filter(|&q| q != 2)
            .collect();
        Ok(Self { hi_max, base })
    }

    pub fn hi_max(&self) -> u64 {
        self.hi_max
    }

    /// Primes in `[lo, hi)`; `hi` must not exceed the sieve's `hi_max`.
    pub fn segment(&self, lo: u64, hi: u64) -> Result<PrimeSegment, PrimeError> {
        if hi > self.hi_max {
            return Err(PrimeError::RangeTooLarge { hi });
        }
        if lo >= hi {
            return Err(PrimeError::EmptyRange { lo, hi });
        }
        let mut primes = Vec::new();
        if lo <= 2 && 2 < hi {
            primes.push(2);
        }
        // Odd candidates only: slot i stands for first_odd + 2i.
        let first_odd = (lo.max(3)) | 1;
        if first_odd < hi {
            let slots = (hi - first_odd).div_ceil(2) as usize;
            let mut composite = vec![false; slots];
            for &q in &self.base {
                let sq = q * q;
                if sq >= hi {
                    break;
                }
                // First odd multiple of q that is >= max(q^2, first_odd).
                let mut start = if sq >= first_odd {
                    sq
                } else {
                    let m = first_odd.div_ceil(q) * q;
                    if m & 1 == 0 {
                        m + q
                    } else {
                        m
                    }
                };
                while start < hi {
                    composite[((start - first_odd) / 2) as usize] = true;
                    start += 2 * q;
                }
            }
            primes.extend(
                composite
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| !c)
                    .map(|(i, _)| first_odd + 2 * i as u64)
                    .filter(|&n| n > 1),
            );
        }
        Ok(PrimeSegment { lo, hi, primes })
    }
}

/// Complete ordered primes in `[lo, hi)`.
pub fn primes_in_range(lo: u64, hi: u64) -> Result<PrimeSegment, PrimeError> {
    SegmentedSieve::new(hi)?.segment(lo, hi)
}

// Jaeschke/Sinclair base set, complete for every n < 2^64.
const MR_BASES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

/// Deterministic Miller-Rabin for the full 64-bit range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let mont = Montgomery64::new(n);
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let one = mont.one();
    let minus_one = mont.to_mont(n - 1);
    'bases: for &a in &MR_BASES {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = mont.pow(mont.to_mont(a), d);
        if x == one || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = mont.mul(x, x);
            if x == minus_one {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn small_ranges() {
        assert_eq!(primes_in_range(7, 20).unwrap().primes, vec![7, 11, 13, 17, 19]);
        assert_eq!(primes_in_range(2, 3).unwrap().primes, vec![2]);
        assert_eq!(primes_in_range(0, 2).unwrap().primes, Vec::<u64>::new());
        assert_eq!(primes_in_range(0, 10).unwrap().primes, vec![2, 3, 5, 7]);
        assert_eq!(primes_in_range(24, 29).unwrap().primes, Vec::<u64>::new());
    }

    #[test]
    fn count_below_600k() {
        assert_eq!(primes_in_range(2, 600_000).unwrap().primes.len(), 49_098);
    }

    #[test]
    fn range_errors() {
        assert_eq!(
            primes_in_range(1, SIEVE_CEILING + 1),
            Err(PrimeError::RangeTooLarge { hi: SIEVE_CEILING + 1 })
        );
        assert!(matches!(primes_in_range(5, 5), Err(PrimeError::EmptyRange { .. })));
    }

    #[test]
    fn segments_near_ceiling() {
        let hi = SIEVE_CEILING;
        let seg = primes_in_range(hi - 2000, hi).unwrap();
        assert!(!seg.primes.is_empty());
        for &p in &seg.primes {
            assert!(is_prime(p));
        }
        let count = (hi - 2000..hi).filter(|&n| is_prime(n)).count();
        assert_eq!(seg.primes.len(), count);
    }

    #[test]
    fn is_prime_examples() {
        assert!(is_prime(61));
        assert!(is_prime(1_680_023));
        assert!(!is_prime(1_680_021));
        assert!(is_prime(7_308_036_881));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(u64::MAX));
        // strong pseudoprime to bases 2, 3, 5, 7, 11, 13, 17, 19, 23
        assert!(!is_prime(3_825_123_056_546_413_051));
    }

    #[test]
    fn is_prime_agrees_with_trial_division_below_1e5() {
        for n in 0..100_000u64 {
            assert_eq!(is_prime(n), trial_division(n), "n = {n}");
        }
    }

    #[test]
    fn isqrt_edges() {
        assert_eq!(isqrt(0), 0);
        assert_eq!(isqrt(15), 3);
        assert_eq!(isqrt(16), 4);
        assert_eq!(isqrt(u64::MAX), u32::MAX as u64);
    }
}
