//! Range scans for zeros of `H(floor(p/N)) mod p`.
//!
//! A scan walks `[from, to)` one sieve segment at a time. Primes within a
//! segment are evaluated by a pool of `shard_count` workers; results are
//! committed in ascending order, and the checkpoint (if any) is rewritten
//! after every committed segment. Output never depends on the worker count.

mod checkpoint;

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

pub use checkpoint::{fnv1a64, read_checkpoint, spec_digest, write_checkpoint, Checkpoint};

use crate::congruence::{self, CongruenceError, HarmonicInstance, MethodKind, MAX_DIVISOR};
use crate::primes::{self, PrimeError, SegmentedSieve, DEFAULT_SEGMENT_WIDTH, SIEVE_CEILING};

/// Zeros with `floor(p/N)` at or below this are re-checked by direct summation.
pub const DIRECT_RECHECK_CUTOFF: u64 = 1_000_000_000;

/// Upper bound on worker threads per search.
pub const MAX_SHARDS: usize = 1024;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("upper limit {to} exceeds the supported ceiling {ceiling}")]
    CeilingExceeded { to: u64, ceiling: u64 },
    #[error("invalid search: {0}")]
    InvalidSpec(String),
    #[error("checkpoint belongs to a different search (digest {found:016x}, expected {expected:016x})")]
    CheckpointMismatch { expected: u64, found: u64 },
    #[error("corrupt checkpoint: {0}")]
    CheckpointCorrupt(String),
    #[error("checkpoint I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("zero at p = {p} failed re-verification with {method}")]
    VerificationFailed { p: u64, method: MethodKind },
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error(transparent)]
    Primes(#[from] PrimeError),
}

pub type Result<T> = std::result::Result<T, SearchError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpec {
    pub n: u64,
    pub method: MethodKind,
    /// Inclusive.
    pub from: u64,
    /// Exclusive.
    pub to: u64,
    pub shard_count: usize,
    pub checkpoint_path: Option<PathBuf>,
    pub segment_width: u64,
}

impl SearchSpec {
    pub fn new(n: u64, method: MethodKind, from: u64, to: u64) -> Self {
        Self {
            n,
            method,
            from,
            to,
            shard_count: 1,
            checkpoint_path: None,
            segment_width: DEFAULT_SEGMENT_WIDTH,
        }
    }

    pub fn with_shards(mut self, shards: usize) -> Self {
        self.shard_count = shards;
        self
    }

    pub fn with_checkpoint(mut self, path: impl Into<PathBuf>) -> Self {
        self.checkpoint_path = Some(path.into());
        self
    }

    pub fn with_segment_width(mut self, width: u64) -> Self {
        self.segment_width = width;
        self
    }

    pub fn digest(&self) -> u64 {
        spec_digest(self.n, self.method, self.from, self.to)
    }

    /// First integer actually scanned: primes must exceed `N`.
    pub fn start(&self) -> u64 {
        self.from.max(self.n + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_DIVISOR).contains(&self.n) {
            return Err(SearchError::InvalidSpec(format!("N = {} outside 2..=46", self.n)));
        }
        if !self.method.supports(self.n) {
            return Err(CongruenceError::MethodUnavailable {
                method: self.method,
                n: self.n,
            }
            .into());
        }
        if self.from >= self.to {
            return Err(SearchError::InvalidSpec(format!(
                "empty range [{}, {})",
                self.from, self.to
            )));
        }
        if self.to > SIEVE_CEILING {
            return Err(SearchError::CeilingExceeded {
                to: self.to,
                ceiling: SIEVE_CEILING,
            });
        }
        if self.shard_count == 0 || self.shard_count > MAX_SHARDS {
            return Err(SearchError::InvalidSpec(format!(
                "shard count must be in 1..={MAX_SHARDS}"
            )));
        }
        if self.segment_width == 0 {
            return Err(SearchError::InvalidSpec("segment width must be positive".into()));
        }
        Ok(())
    }
}

/// One prime at which the harmonic residue vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroRecord {
    pub p: u64,
    pub n: u64,
    pub method: MethodKind,
}

impl fmt::Display for ZeroRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} N={} method={} residue=0", self.p, self.n, self.method)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub zeros: Vec<ZeroRecord>,
    /// Smallest integer not yet scanned; equals `to` for a finished run.
    pub next: u64,
    /// Primes evaluated by this invocation (excludes work recovered from a checkpoint).
    pub primes_scanned: u64,
}

impl SearchOutcome {
    pub fn is_complete(&self, spec: &SearchSpec) -> bool {
        self.next >= spec.to
    }
}

/// Scans the whole range, resuming from the checkpoint file if one exists.
pub fn run_search(spec: &SearchSpec) -> Result<Vec<ZeroRecord>> {
    run_search_until(spec, None).map(|o| o.zeros)
}

/// Continues a search from an existing checkpoint file; `spec` must be the
/// one that produced it.
pub fn resume(spec: &SearchSpec) -> Result<Vec<ZeroRecord>> {
    let path = spec
        .checkpoint_path
        .as_deref()
        .ok_or_else(|| SearchError::InvalidSpec("resume needs a checkpoint path".into()))?;
    if !path.exists() {
        return Err(SearchError::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("no checkpoint at {}", path.display()),
        )));
    }
    run_search(spec)
}

fn load_state(spec: &SearchSpec, path: &Path) -> Result<Option<Checkpoint>> {
    if !path.exists() {
        return Ok(None);
    }
    let cp = read_checkpoint(path)?;
    let expected = spec.digest();
    if cp.spec_digest != expected {
        return Err(SearchError::CheckpointMismatch {
            expected,
            found: cp.spec_digest,
        });
    }
    if cp.next < spec.from || cp.next > spec.to {
        return Err(SearchError::CheckpointCorrupt(format!(
            "next = {} outside [{}, {}]",
            cp.next, spec.from, spec.to
        )));
    }
    if cp.zeros.first().is_some_and(|&z| z < spec.start()) {
        return Err(SearchError::CheckpointCorrupt("zero below the scan start".into()));
    }
    Ok(Some(cp))
}

/// Scans until `halt` (exclusive) or the end of the range, whichever is
/// first, checkpointing after every segment.
pub fn run_search_until(spec: &SearchSpec, halt: Option<u64>) -> Result<SearchOutcome> {
    spec.validate()?;
    let (mut next, mut zeros) = match spec.checkpoint_path.as_deref() {
        Some(path) => match load_state(spec, path)? {
            Some(cp) => (cp.next, cp.zeros),
            None => (spec.from, Vec::new()),
        },
        None => (spec.from, Vec::new()),
    };
    let end = halt.map_or(spec.to, |h| h.clamp(next, spec.to));
    let pool = if spec.shard_count > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(spec.shard_count)
                .build()
                .map_err(|e| SearchError::InvalidSpec(e.to_string()))?,
        )
    } else {
        None
    };
    let sieve = SegmentedSieve::new(spec.to)?;
    let mut scanned = 0u64;
    let start = spec.start();
    while next < end {
        let seg_hi = next.saturating_add(spec.segment_width).min(end);
        let lo = next.max(start);
        if lo < seg_hi {
            let seg = sieve.segment(lo, seg_hi)?;
            scanned += seg.primes.len() as u64;
            let found = match &pool {
                Some(pool) => pool.install(|| scan_parallel(&seg.primes, spec)),
                None => scan_serial(&seg.primes, spec),
            }?;
            for &p in &found {
                reverify(p, spec.n, spec.method)?;
            }
            zeros.extend(found);
        }
        next = seg_hi;
        if let Some(path) = spec.checkpoint_path.as_deref() {
            write_checkpoint(
                &Checkpoint {
                    spec_digest: spec.digest(),
                    next,
                    zeros: zeros.clone(),
                },
                path,
            )?;
        }
    }
    Ok(SearchOutcome {
        zeros: zeros
            .into_iter()
            .map(|p| ZeroRecord {
                p,
                n: spec.n,
                method: spec.method,
            })
            .collect(),
        next,
        primes_scanned: scanned,
    })
}

fn test_prime(p: u64, spec: &SearchSpec) -> Result<Option<u64>> {
    let inst = HarmonicInstance::new_unchecked(p, spec.n);
    Ok(congruence::is_zero(&inst, spec.method)?.then_some(p))
}

fn scan_serial(primes: &[u64], spec: &SearchSpec) -> Result<Vec<u64>> {
    primes.iter().filter_map(|&p| test_prime(p, spec).transpose()).collect()
}

fn scan_parallel(primes: &[u64], spec: &SearchSpec) -> Result<Vec<u64>> {
    primes
        .par_iter()
        .with_min_len(64)
        .filter_map(|&p| test_prime(p, spec).transpose())
        .collect()
}

/// Re-checks a zero found by `primary` through an independent route: the
/// direct sum when it is affordable, otherwise the other quotient form.
fn reverify(p: u64, n: u64, primary: MethodKind) -> Result<()> {
    let inst = HarmonicInstance::new_unchecked(p, n);
    let ok = match primary {
        MethodKind::DirectSum => congruence::harmonic_residue_batched(&inst, 1).is_zero(),
        _ if inst.m() <= DIRECT_RECHECK_CUTOFF => congruence::harmonic_residue_direct(&inst).is_zero(),
        MethodKind::LehmerFQ => congruence::residue_432(p)?.is_zero(),
        MethodKind::Base432FQ => congruence::lehmer_residue(p)?.is_zero(),
    };
    if ok {
        Ok(())
    } else {
        Err(SearchError::VerificationFailed { p, method: primary })
    }
}

/// Residue of one candidate under one method.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodResidue {
    pub method: MethodKind,
    pub residue: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub p: u64,
    pub n: u64,
    pub residues: Vec<MethodResidue>,
}

impl VerifyReport {
    pub fn all_zero(&self) -> bool {
        self.residues.iter().all(|r| r.residue == 0)
    }

    /// Whether the methods agree on zero status (they may legitimately
    /// differ by the factor -2 otherwise).
    pub fn zero_status_agrees(&self) -> bool {
        let mut it = self.residues.iter().map(|r| r.residue == 0);
        match it.next() {
            Some(first) => it.all(|z| z == first),
            None => true,
        }
    }
}

/// Evaluates a single candidate under each requested method, in the order
/// `DirectSum`, `LehmerFQ`, `Base432FQ`.
pub fn verify_single(p: u64, n: u64, methods: &[MethodKind]) -> Result<VerifyReport> {
    let inst = HarmonicInstance::new(p, n)?;
    let mut methods = methods.to_vec();
    methods.sort();
    methods.dedup();
    let residues = methods
        .into_iter()
        .map(|method| {
            congruence::residue(&inst, method).map(|r| MethodResidue {
                method,
                residue: r.value(),
            })
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(VerifyReport { p, n, residues })
}

/// Count of primes the range `[spec.start(), spec.to)` contains.
pub fn expected_prime_count(spec: &SearchSpec) -> Result<u64> {
    let start = spec.start();
    if start >= spec.to {
        return Ok(0);
    }
    Ok(primes::primes_in_range(start, spec.to)?.primes.len() as u64)
}
