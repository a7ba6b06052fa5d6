//! Evaluation of `H(floor(p/N)) mod p`.
//!
//! Two routes are available. The direct route sums the reciprocals
//! `1/j mod p` for `j = 1..=floor(p/N)`, costing `O(p)` per prime. For `N = 6`
//! the harmonic number is tied to Fermat quotients,
//!
//! ```text
//! H(floor(p/6)) == -2 q_p(2) - (3/2) q_p(3)   (mod p),   q_p(b) = (b^(p-1) - 1) / p
//! ```
//!
//! so two exponentiations suffice. Multiplying by `-2` gives `4 q_p(2) + 3 q_p(3)`
//! with the same zeros, and the rules `q_p(ab) == q_p(a) + q_p(b)`,
//! `q_p(b^k) == k q_p(b)` fold that into the single quotient `q_p(432)`.

use thiserror::Error;

use crate::modmath::{self, ModError, Modulus, Residue};
use crate::primes::is_prime;

/// Largest divisor `N` accepted by [`HarmonicInstance`].
pub const MAX_DIVISOR: u64 = 46;

/// Block length for batch inversion in the direct sum.
pub const DEFAULT_BATCH: usize = 4096;

/// `432 = 2^4 * 3^3`.
pub const BASE_432: u128 = 432;

/// Primes must satisfy `p^2 < 2^104` for the quotient routes.
pub const QUOTIENT_PRIME_CEILING: u64 = 1 << 52;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CongruenceError {
    #[error("p = {p} does not exceed N = {n}; the harmonic sum is vacuous")]
    VacuousSum { p: u64, n: u64 },
    #[error("divisor N = {0} outside 2..=46")]
    InvalidDivisor(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {0} is not valid for this evaluation")]
    InvalidPrime(u64),
    #[error("base {base} shares a factor with p = {p}")]
    BaseNotCoprime { p: u64, base: u128 },
    #[error("{method} requires N = 6 (got N = {n})")]
    MethodUnavailable { method: MethodKind, n: u64 },
    #[error("intermediate value exceeds the supported range")]
    Overflow,
    #[error(transparent)]
    Arithmetic(#[from] ModError),
}

pub type Result<T> = std::result::Result<T, CongruenceError>;

/// A prime `p` and divisor `N` with `p > N`; the sum runs to `floor(p/N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarmonicInstance {
    p: u64,
    n: u64,
}

impl HarmonicInstance {
    pub fn new(p: u64, n: u64) -> Result<Self> {
        if !(2..=MAX_DIVISOR).contains(&n) {
            return Err(CongruenceError::InvalidDivisor(n));
        }
        if p <= n {
            return Err(CongruenceError::VacuousSum { p, n });
        }
        if !is_prime(p) {
            return Err(CongruenceError::NotPrime(p));
        }
        Ok(Self { p, n })
    }

    /// For callers that already know `p` is a prime above `n` (sieve output).
    pub(crate) fn new_unchecked(p: u64, n: u64) -> Self {
        debug_assert!(p > n && (2..=MAX_DIVISOR).contains(&n));
        Self { p, n }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Summation bound `floor(p/N)`.
    pub fn m(&self) -> u64 {
        self.p / self.n
    }
}

/// A Fermat-quotient base `b >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuotientBase(pub u128);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodKind {
    /// Sum of reciprocals.
    DirectSum,
    /// `-2 q_p(2) - (3/2) q_p(3)`.
    LehmerFQ,
    /// `q_p(432)`, a `-2` multiple of the harmonic residue.
    Base432FQ,
}

impl MethodKind {
    pub const ALL: [MethodKind; 3] = [MethodKind::DirectSum, MethodKind::LehmerFQ, MethodKind::Base432FQ];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::DirectSum => "DirectSum",
            MethodKind::LehmerFQ => "LehmerFQ",
            MethodKind::Base432FQ => "Base432FQ",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }

    /// Whether the method applies to divisor `n`.
    pub fn supports(self, n: u64) -> bool {
        self == MethodKind::DirectSum || n == 6
    }
}

impl std::fmt::Display for MethodKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn prime_modulus(p: u64) -> Modulus {
    Modulus::new(p as u128).expect("p >= 2")
}

/// `H(floor(p/N)) mod p` by batch-inverting blocks of `DEFAULT_BATCH` terms.
pub fn harmonic_residue_direct(inst: &HarmonicInstance) -> Residue {
    harmonic_residue_batched(inst, DEFAULT_BATCH)
}

/// Direct sum with an explicit batch length (`>= 1`).
pub fn harmonic_residue_batched(inst: &HarmonicInstance, batch: usize) -> Residue {
    let batch = batch.clamp(1, 1 << 24);
    let modulus = prime_modulus(inst.p);
    // p > N >= 2, so p is an odd prime and has a one-word Montgomery context.
    let mont = *modulus.montgomery64().expect("odd prime modulus below 2^64");
    let m = inst.m();
    let p = inst.p as u128;
    let mut block = Vec::with_capacity(batch.min(m as usize));
    let mut scratch = Vec::with_capacity(block.capacity());
    // Plain j is read as the Montgomery form of j/R, so each inverse comes
    // back as (j/R)^{-1} * R = j^{-1} R^2; two reductions at the end undo it.
    let mut sum = 0u128;
    let mut j = 1u64;
    while j <= m {
        let hi = m.min(j + batch as u64 - 1);
        block.clear();
        block.extend(j..=hi);
        mont.batch_invert(&mut block, &mut scratch)
            .expect("1..p-1 are units mod p");
        // at most 2^32 terms below 2^64 each: no u128 overflow
        let block_sum: u128 = block.iter().map(|&x| x as u128).sum();
        sum = (sum + block_sum) % p;
        j = hi + 1;
    }
    let h = mont.from_mont(mont.from_mont(sum as u64));
    modulus.residue(h as u128)
}

/// Direct sum with one extended-gcd inversion per term.
pub fn harmonic_residue_per_term(inst: &HarmonicInstance) -> Residue {
    let modulus = prime_modulus(inst.p);
    let mut sum = modulus.zero();
    for j in 1..=inst.m() {
        let inv = modmath::inv_mod(modulus.residue(j as u128), &modulus).expect("j < p");
        sum = modmath::add_mod(sum, inv, &modulus);
    }
    sum
}

/// Fermat quotient `q_p(b) = (b^(p-1) - 1) / p mod p`, via one exponentiation
/// modulo `p^2` and an exact division.
pub fn fermat_quotient(p: u64, base: QuotientBase) -> Result<Residue> {
    if !(2..QUOTIENT_PRIME_CEILING).contains(&p) {
        return Err(CongruenceError::InvalidPrime(p));
    }
    let pp = p as u128;
    if base.0.is_multiple_of(pp) {
        return Err(CongruenceError::BaseNotCoprime { p, base: base.0 });
    }
    let square = Modulus::new(pp * pp)?;
    let t = modmath::pow_mod(square.residue(base.0), (p - 1) as u128, &square).value();
    // t == 1 mod p whenever p is prime and coprime to b.
    if t % pp != 1 {
        return Err(CongruenceError::NotPrime(p));
    }
    let q = (t - 1) / pp;
    Ok(prime_modulus(p).residue(q))
}

fn require_above_five(p: u64) -> Result<()> {
    if p <= 5 {
        Err(CongruenceError::InvalidPrime(p))
    } else {
        Ok(())
    }
}

/// `(-2 q_p(2) - 3 * inv(2) * q_p(3)) mod p`.
pub fn lehmer_residue(p: u64) -> Result<Residue> {
    require_above_five(p)?;
    let m = prime_modulus(p);
    let q2 = fermat_quotient(p, QuotientBase(2))?;
    let q3 = fermat_quotient(p, QuotientBase(3))?;
    let half = modmath::inv_mod(m.residue(2), &m)?;
    let two_q2 = modmath::mul_mod(m.residue(2), q2, &m);
    let three_halves_q3 = modmath::mul_mod(modmath::mul_mod(m.residue(3), half, &m), q3, &m);
    let sum = modmath::add_mod(two_q2, three_halves_q3, &m);
    Ok(modmath::sub_mod(m.zero(), sum, &m))
}

/// `(4 q_p(2) + 3 q_p(3)) mod p`, which is `-2` times [`lehmer_residue`].
pub fn scaled_zero_form(p: u64) -> Result<Residue> {
    require_above_five(p)?;
    let m = prime_modulus(p);
    let q2 = fermat_quotient(p, QuotientBase(2))?;
    let q3 = fermat_quotient(p, QuotientBase(3))?;
    Ok(modmath::add_mod(
        modmath::mul_mod(m.residue(4), q2, &m),
        modmath::mul_mod(m.residue(3), q3, &m),
        &m,
    ))
}

/// `q_p(432)`: the consolidated single-exponentiation form.
///
/// `p = 5` is computable (it is a zero of `q_p(432)`) but lies below the
/// `N = 6` threshold; `p <= 3` divides the base.
pub fn residue_432(p: u64) -> Result<Residue> {
    if p <= 3 {
        return Err(CongruenceError::InvalidPrime(p));
    }
    fermat_quotient(p, QuotientBase(BASE_432))
}

/// Checks `q_p(ab) == q_p(a) + q_p(b) (mod p)`.
pub fn eisenstein_product_check(p: u64, a: QuotientBase, b: QuotientBase) -> Result<bool> {
    let ab = a.0.checked_mul(b.0).ok_or(CongruenceError::Overflow)?;
    let m = prime_modulus(p);
    let lhs = fermat_quotient(p, QuotientBase(ab))?;
    let rhs = modmath::add_mod(fermat_quotient(p, a)?, fermat_quotient(p, b)?, &m);
    Ok(lhs == rhs)
}

/// Checks `q_p(b^k) == k q_p(b) (mod p)`.
pub fn eisenstein_power_check(p: u64, b: QuotientBase, k: u32) -> Result<bool> {
    let bk = b.0.checked_pow(k).ok_or(CongruenceError::Overflow)?;
    let m = prime_modulus(p);
    let lhs = fermat_quotient(p, QuotientBase(bk))?;
    let rhs = modmath::mul_mod(m.residue(k as u128), fermat_quotient(p, b)?, &m);
    Ok(lhs == rhs)
}

/// Residue of `inst` under `method`. `DirectSum` and `LehmerFQ` agree
/// exactly; `Base432FQ` is `-2` times that value, so all three share zeros.
pub fn residue(inst: &HarmonicInstance, method: MethodKind) -> Result<Residue> {
    if !method.supports(inst.n) {
        return Err(CongruenceError::MethodUnavailable { method, n: inst.n });
    }
    match method {
        MethodKind::DirectSum => Ok(harmonic_residue_direct(inst)),
        MethodKind::LehmerFQ => lehmer_residue(inst.p),
        MethodKind::Base432FQ => {
            require_above_five(inst.p)?;
            residue_432(inst.p)
        }
    }
}

pub fn is_zero(inst: &HarmonicInstance, method: MethodKind) -> Result<bool> {
    residue(inst, method).map(|r| r.is_zero())
}
