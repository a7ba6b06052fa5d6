//! Modular arithmetic for moduli up to 2^104.
//!
//! A [`Modulus`] picks its reduction strategy once at construction:
//! Montgomery with a one-word radix for odd moduli below 2^64, Montgomery
//! with a two-word radix for odd moduli up to 2^104, and plain division or
//! shift-and-add for even moduli. Every strategy returns the least
//! non-negative representative, so callers never see which one ran.

mod mont64;
mod wide;

pub use mont64::Montgomery64;
pub use wide::Montgomery128;

use thiserror::Error;

/// Exclusive upper bound on supported modulus values.
pub const MODULUS_CEILING: u128 = 1 << 104;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModError {
    #[error("modulus {0} outside the supported range [2, 2^104)")]
    ModulusOutOfRange(u128),
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: u128, modulus: u128 },
    #[error("element {index} ({value}) is not invertible modulo {modulus}")]
    NotInvertibleAt { index: usize, value: u128, modulus: u128 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Reducer {
    Native,
    Mont64(Montgomery64),
    Mont128(Montgomery128),
    Shift,
}

/// A modulus `2 <= value < 2^104` together with its reduction constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Modulus {
    value: u128,
    reducer: Reducer,
}

impl Modulus {
    pub fn new(value: u128) -> Result<Self, ModError> {
        if !(2..MODULUS_CEILING).contains(&value) {
            return Err(ModError::ModulusOutOfRange(value));
        }
        let odd = value & 1 == 1;
        let reducer = match (value <= u64::MAX as u128, odd) {
            (true, true) if value > 2 => Reducer::Mont64(Montgomery64::new(value as u64)),
            (true, _) => Reducer::Native,
            (false, true) => Reducer::Mont128(Montgomery128::new(value)),
            (false, false) => Reducer::Shift,
        };
        Ok(Self { value, reducer })
    }

    #[inline]
    pub fn value(&self) -> u128 {
        self.value
    }

    /// Reduces an arbitrary integer into a residue.
    #[inline]
    pub fn residue(&self, x: u128) -> Residue {
        Residue {
            value: x % self.value,
            modulus: self.value,
        }
    }

    #[inline]
    pub fn zero(&self) -> Residue {
        self.residue(0)
    }

    #[inline]
    pub fn one(&self) -> Residue {
        self.residue(1)
    }

    /// The one-word Montgomery context, when this modulus has one.
    pub fn montgomery64(&self) -> Option<&Montgomery64> {
        match &self.reducer {
            Reducer::Mont64(m) => Some(m),
            _ => None,
        }
    }

    #[inline]
    fn mul_raw(&self, a: u128, b: u128) -> u128 {
        match &self.reducer {
            Reducer::Native | Reducer::Mont64(_) => a * b % self.value,
            Reducer::Mont128(m) => m.mul_plain(a, b),
            Reducer::Shift => wide::mul_mod_shift(a, b, self.value),
        }
    }
}

/// A least non-negative residue, tagged with the modulus it belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u128,
    modulus: u128,
}

impl Residue {
    #[inline]
    pub fn value(&self) -> u128 {
        self.value
    }

    #[inline]
    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

impl std::fmt::Display for Residue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub fn add_mod(a: Residue, b: Residue, m: &Modulus) -> Residue {
    debug_assert!(a.modulus == m.value && b.modulus == m.value);
    let (s, carry) = a.value.overflowing_add(b.value);
    debug_assert!(!carry);
    m.residue(if s >= m.value { s - m.value } else { s })
}

pub fn sub_mod(a: Residue, b: Residue, m: &Modulus) -> Residue {
    debug_assert!(a.modulus == m.value && b.modulus == m.value);
    m.residue(if a.value >= b.value {
        a.value - b.value
    } else {
        m.value - (b.value - a.value)
    })
}

pub fn mul_mod(a: Residue, b: Residue, m: &Modulus) -> Residue {
    debug_assert!(a.modulus == m.value && b.modulus == m.value);
    Residue {
        value: m.mul_raw(a.value, b.value),
        modulus: m.value,
    }
}

/// `base^exponent mod m` by square-and-multiply.
pub fn pow_mod(base: Residue, exponent: u128, m: &Modulus) -> Residue {
    debug_assert_eq!(base.modulus, m.value);
    let value = match &m.reducer {
        Reducer::Mont64(mont) => {
            let b = mont.to_mont(base.value as u64);
            let mut acc = mont.one();
            let mut sq = b;
            let mut e = exponent;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mont.mul(acc, sq);
                }
                sq = mont.mul(sq, sq);
                e >>= 1;
            }
            mont.from_mont(acc) as u128
        }
        Reducer::Mont128(mont) => mont.from_mont(mont.pow(mont.to_mont(base.value), exponent)),
        Reducer::Native | Reducer::Shift => {
            let mut acc = 1 % m.value;
            let mut sq = base.value;
            let mut e = exponent;
            while e > 0 {
                if e & 1 == 1 {
                    acc = m.mul_raw(acc, sq);
                }
                sq = m.mul_raw(sq, sq);
                e >>= 1;
            }
            acc
        }
    };
    Residue {
        value,
        modulus: m.value,
    }
}

/// Inverse of `a` modulo `n` by the extended Euclidean algorithm, or `None`
/// when `gcd(a, n) != 1`.
pub(crate) fn inv_u128(a: u128, n: u128) -> Option<u128> {
    // Bezout coefficients stay below n in magnitude, and n < 2^104.
    let (mut r0, mut r1) = (n as i128, (a % n) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(if t0 < 0 { (t0 + n as i128) as u128 } else { t0 as u128 })
}

pub fn inv_mod(a: Residue, p: &Modulus) -> Result<Residue, ModError> {
    debug_assert_eq!(a.modulus, p.value);
    inv_u128(a.value, p.value)
        .map(|x| p.residue(x))
        .ok_or(ModError::NotInvertible {
            value: a.value,
            modulus: p.value,
        })
}

/// Element-wise inverses via prefix products: one extended-gcd call and
/// `3(k - 1)` multiplications for `k` inputs.
pub fn batch_inv_mod(values: &[Residue], p: &Modulus) -> Result<Vec<Residue>, ModError> {
    if values.is_empty() {
        return Ok(Vec::new());
    }
    let mut prefix = Vec::with_capacity(values.len());
    let mut acc = values[0];
    prefix.push(acc);
    for &v in &values[1..] {
        acc = mul_mod(acc, v, p);
        prefix.push(acc);
    }
    let mut inv = inv_mod(acc, p).map_err(|_| {
        let index = values
            .iter()
            .position(|v| inv_u128(v.value, p.value).is_none())
            .unwrap_or(0);
        ModError::NotInvertibleAt {
            index,
            value: values[index].value,
            modulus: p.value,
        }
    })?;
    let mut out = vec![p.zero(); values.len()];
    for i in (1..values.len()).rev() {
        out[i] = mul_mod(inv, prefix[i - 1], p);
        inv = mul_mod(inv, values[i], p);
    }
    out[0] = inv;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(m: &Modulus, x: u128) -> Residue {
        m.residue(x)
    }

    #[test]
    fn rejects_out_of_range_moduli() {
        assert!(Modulus::new(0).is_err());
        assert!(Modulus::new(1).is_err());
        assert!(Modulus::new(MODULUS_CEILING).is_err());
        assert!(Modulus::new(MODULUS_CEILING - 1).is_ok());
    }

    #[test]
    fn mul_small() {
        let m = Modulus::new(5).unwrap();
        assert_eq!(mul_mod(r(&m, 3), r(&m, 4), &m).value(), 2);
    }

    #[test]
    fn minus_one_squared_is_one() {
        for n in [
            2u128,
            3,
            4,
            1 << 64,
            (1 << 64) + 1,
            (1 << 90) + 33,
            MODULUS_CEILING - 1,
            MODULUS_CEILING - 2,
        ] {
            let m = Modulus::new(n).unwrap();
            assert_eq!(mul_mod(r(&m, n - 1), r(&m, n - 1), &m).value(), 1, "n = {n}");
        }
    }

    #[test]
    fn mul_large_frozen_oracle() {
        // (2^60 + 7)(2^60 + 11) mod (2^90 + 33), from an arbitrary-precision oracle.
        let m = Modulus::new((1 << 90) + 33).unwrap();
        let got = mul_mod(r(&m, (1 << 60) + 7), r(&m, (1 << 60) + 11), &m);
        assert_eq!(got.value(), 20_752_587_047_489_765_453);
    }

    #[test]
    fn pow_examples() {
        let m61 = Modulus::new(61).unwrap();
        assert_eq!(pow_mod(r(&m61, 2), 60, &m61).value(), 1);
        let m49 = Modulus::new(49).unwrap();
        assert_eq!(pow_mod(r(&m49, 40), 6, &m49).value(), 36);
        for n in [2u128, 10, 61, (1 << 70) + 1, 1 << 80] {
            let m = Modulus::new(n).unwrap();
            assert_eq!(pow_mod(r(&m, 12345), 0, &m).value(), 1);
        }
    }

    #[test]
    fn inverse_examples() {
        let m7 = Modulus::new(7).unwrap();
        assert_eq!(inv_mod(r(&m7, 1), &m7).unwrap().value(), 1);
        assert_eq!(inv_mod(r(&m7, 3), &m7).unwrap().value(), 5);
        let m61 = Modulus::new(61).unwrap();
        let x = inv_mod(r(&m61, 2520), &m61).unwrap();
        assert_eq!(x.value(), 45);
        assert_eq!(mul_mod(r(&m61, 2520), x, &m61).value(), 1);
    }

    #[test]
    fn inverse_of_zero_or_shared_factor_fails() {
        let m7 = Modulus::new(7).unwrap();
        assert!(matches!(inv_mod(m7.zero(), &m7), Err(ModError::NotInvertible { .. })));
        let m12 = Modulus::new(12).unwrap();
        assert!(inv_mod(r(&m12, 8), &m12).is_err());
    }

    #[test]
    fn batch_examples() {
        let m7 = Modulus::new(7).unwrap();
        let one = batch_inv_mod(&[r(&m7, 1)], &m7).unwrap();
        assert_eq!(one, vec![r(&m7, 1)]);
        let got: Vec<u128> = batch_inv_mod(&[r(&m7, 1), r(&m7, 2), r(&m7, 3)], &m7)
            .unwrap()
            .iter()
            .map(Residue::value)
            .collect();
        assert_eq!(got, vec![1, 4, 5]);
        assert!(batch_inv_mod(&[], &m7).unwrap().is_empty());
    }

    #[test]
    fn batch_reports_offending_index() {
        let m7 = Modulus::new(7).unwrap();
        let err = batch_inv_mod(&[r(&m7, 1), r(&m7, 14), r(&m7, 3)], &m7).unwrap_err();
        assert_eq!(
            err,
            ModError::NotInvertibleAt {
                index: 1,
                value: 0,
                modulus: 7
            }
        );
    }

    #[test]
    fn batch_matches_elementwise_for_first_4096() {
        let m = Modulus::new(1_680_023).unwrap();
        let vals: Vec<Residue> = (1..=4096).map(|j| r(&m, j)).collect();
        let batch = batch_inv_mod(&vals, &m).unwrap();
        for (v, b) in vals.iter().zip(&batch) {
            assert_eq!(*b, inv_mod(*v, &m).unwrap());
        }
    }
}
