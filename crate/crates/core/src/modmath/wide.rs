//! Double-word arithmetic for moduli between 2^64 and 2^104.

/// Full 256-bit product of two `u128` values as `(lo, hi)`.
#[inline]
pub(crate) fn widening_mul(a: u128, b: u128) -> (u128, u128) {
    let (a0, a1) = (a as u64 as u128, a >> 64);
    let (b0, b1) = (b as u64 as u128, b >> 64);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 as u64 as u128) + (p10 as u64 as u128);
    let lo = (p00 as u64 as u128) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (lo, hi)
}

/// Montgomery arithmetic with R = 2^128 for an odd modulus below 2^127.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Montgomery128 {
    n: u128,
    n_neg_inv: u128,
    one: u128,
    r2: u128,
}

impl Montgomery128 {
    pub fn new(n: u128) -> Self {
        assert!(n & 1 == 1 && n > 1 && n < (1 << 127));
        let mut inv = n;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(inv)));
        }
        debug_assert_eq!(n.wrapping_mul(inv), 1);
        let one = (u128::MAX % n + 1) % n;
        // R^2 = R * 2^128: double R mod n 128 times.
        let mut r2 = one;
        for _ in 0..128 {
            r2 = add_mod(r2, r2, n);
        }
        Self {
            n,
            n_neg_inv: inv.wrapping_neg(),
            one,
            r2,
        }
    }

    #[inline]
    pub fn one(&self) -> u128 {
        self.one
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        let (lo, hi) = widening_mul(a, b);
        let m = lo.wrapping_mul(self.n_neg_inv);
        let (mn_lo, mn_hi) = widening_mul(m, self.n);
        let (_, carry) = lo.overflowing_add(mn_lo);
        let r = hi + mn_hi + carry as u128;
        if r >= self.n {
            r - self.n
        } else {
            r
        }
    }

    /// `a * b mod n` for operands in ordinary (non-Montgomery) form.
    #[inline]
    pub fn mul_plain(&self, a: u128, b: u128) -> u128 {
        self.mul(self.mul(a, b), self.r2)
    }

    #[inline]
    pub fn to_mont(&self, a: u128) -> u128 {
        self.mul(a % self.n, self.r2)
    }

    #[inline]
    pub fn from_mont(&self, a: u128) -> u128 {
        self.mul(a, 1)
    }

    pub fn pow(&self, base: u128, mut exp: u128) -> u128 {
        let mut acc = self.one;
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            exp >>= 1;
        }
        acc
    }
}

/// `a + b mod n` for `a, b < n < 2^127`.
#[inline]
pub(crate) fn add_mod(a: u128, b: u128, n: u128) -> u128 {
    let s = a + b;
    if s >= n {
        s - n
    } else {
        s
    }
}

/// Shift-and-add product; handles even moduli that Montgomery cannot.
pub(crate) fn mul_mod_shift(a: u128, b: u128, n: u128) -> u128 {
    let mut acc = 0u128;
    let bits = 128 - b.leading_zeros();
    for i in (0..bits).rev() {
        acc = add_mod(acc, acc, n);
        if (b >> i) & 1 == 1 {
            acc = add_mod(acc, a, n);
        }
    }
    acc
}
