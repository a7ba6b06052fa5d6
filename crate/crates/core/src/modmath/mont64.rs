/// Montgomery arithmetic for an odd modulus below 2^64, with R = 2^64.
///
/// Values handed to `mul`, `add`, `sub` and `pow` are in Montgomery form
/// (`x * R mod n`); use [`Montgomery64::to_mont`] and
/// [`Montgomery64::from_mont`] at the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Montgomery64 {
    n: u64,
    // n^{-1} mod 2^64
    n_inv: u64,
    // R mod n
    one: u64,
    // R^2 mod n
    r2: u64,
}

impl Montgomery64 {
    /// Panics if `n` is even or `n < 3`.
    pub fn new(n: u64) -> Self {
        assert!(n & 1 == 1 && n > 1, "Montgomery modulus must be odd and > 1");
        // n * n == 1 mod 8 for odd n, so `n` is its own inverse to 3 bits;
        // each Newton step doubles the number of correct bits.
        let mut inv = n;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(n.wrapping_mul(inv)));
        }
        debug_assert_eq!(n.wrapping_mul(inv), 1);
        let one = ((1u128 << 64) % n as u128) as u64;
        let r2 = ((one as u128 * one as u128) % n as u128) as u64;
        Self { n, n_inv: inv, one, r2 }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.n
    }

    /// Montgomery form of 1.
    #[inline]
    pub fn one(&self) -> u64 {
        self.one
    }

    /// `t * R^{-1} mod n` for `t < n * R`, in the subtractive form: the low
    /// words of `t` and `m * n` cancel exactly, leaving `hi(t) - hi(m * n)`.
    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.n_inv);
        let mn_hi = ((m as u128 * self.n as u128) >> 64) as u64;
        let t_hi = (t >> 64) as u64;
        let (r, borrow) = t_hi.overflowing_sub(mn_hi);
        // branch-free: the borrow is data dependent and mispredicts often
        r.wrapping_add(self.n & (borrow as u64).wrapping_neg())
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (s, carry) = a.overflowing_add(b);
        let (d, borrow) = s.overflowing_sub(self.n);
        let keep_sum = (borrow & !carry) as u64;
        d ^ ((s ^ d) & keep_sum.wrapping_neg())
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let (d, borrow) = a.overflowing_sub(b);
        d.wrapping_add(self.n & (borrow as u64).wrapping_neg())
    }

    #[inline]
    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.n, self.r2)
    }

    #[inline]
    pub fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
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

    /// Inverts every element of `values` (Montgomery form) in place with a
    /// single extended-gcd call. `prefix` is scratch space reused between
    /// calls. Returns the index of the first non-invertible element on
    /// failure, leaving `values` untouched.
    ///
    /// The prefix products run as `LANES` interleaved chains so consecutive
    /// multiplications do not wait on each other.
    pub fn batch_invert(&self, values: &mut [u64], prefix: &mut Vec<u64>) -> Result<(), usize> {
        const LANES: usize = 4;
        if values.is_empty() {
            return Ok(());
        }
        prefix.clear();
        prefix.resize(values.len(), 0);
        let split = values.len() / LANES * LANES;
        let (mut a0, mut a1, mut a2, mut a3) = (self.one, self.one, self.one, self.one);
        for (v, p) in values[..split]
            .chunks_exact(LANES)
            .zip(prefix[..split].chunks_exact_mut(LANES))
        {
            p[0] = a0;
            p[1] = a1;
            p[2] = a2;
            p[3] = a3;
            a0 = self.mul(a0, v[0]);
            a1 = self.mul(a1, v[1]);
            a2 = self.mul(a2, v[2]);
            a3 = self.mul(a3, v[3]);
        }
        let mut acc = [a0, a1, a2, a3];
        for (i, (v, p)) in values[split..].iter().zip(&mut prefix[split..]).enumerate() {
            *p = acc[i];
            acc[i] = self.mul(acc[i], *v);
        }
        let left = self.mul(acc[0], acc[1]);
        let right = self.mul(acc[2], acc[3]);
        let total = self.from_mont(self.mul(left, right));
        let inv_total = match super::inv_u128(total as u128, self.n as u128) {
            Some(x) => self.to_mont(x as u64),
            None => {
                return Err(values
                    .iter()
                    .position(|&v| super::inv_u128(self.from_mont(v) as u128, self.n as u128).is_none())
                    .unwrap_or(0))
            }
        };
        let inv_left = self.mul(inv_total, right);
        let inv_right = self.mul(inv_total, left);
        let mut inv = [
            self.mul(inv_left, acc[1]),
            self.mul(inv_left, acc[0]),
            self.mul(inv_right, acc[3]),
            self.mul(inv_right, acc[2]),
        ];
        for (i, (v, p)) in values[split..].iter_mut().zip(&prefix[split..]).enumerate().rev() {
            let x = *v;
            *v = self.mul(inv[i], *p);
            inv[i] = self.mul(inv[i], x);
        }
        let [mut i0, mut i1, mut i2, mut i3] = inv;
        for (v, p) in values[..split]
            .chunks_exact_mut(LANES)
            .zip(prefix[..split].chunks_exact(LANES))
            .rev()
        {
            let x = [v[0], v[1], v[2], v[3]];
            v[0] = self.mul(i0, p[0]);
            v[1] = self.mul(i1, p[1]);
            v[2] = self.mul(i2, p[2]);
            v[3] = self.mul(i3, p[3]);
            i0 = self.mul(i0, x[0]);
            i1 = self.mul(i1, x[1]);
            i2 = self.mul(i2, x[2]);
            i3 = self.mul(i3, x[3]);
        }
        Ok(())
    }
}
