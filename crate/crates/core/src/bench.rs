//! Timing comparison of the direct sum against the Fermat-quotient routes.
//!
//! Every timed run is a real scan of `[7, n)` for `N = 6`, so its zeros are
//! recorded alongside the wall time. Runs whose estimated time exceeds the
//! budget are reported as skipped instead of being attempted.

use std::fmt::Write as _;
use std::time::Instant;

use thiserror::Error;

use crate::congruence::{self, HarmonicInstance, MethodKind};
use crate::primes::{is_prime, SIEVE_CEILING};
use crate::search::{run_search_until, SearchSpec};

/// Scans start at the least prime for which `H(floor(p/6))` is non-vacuous.
pub const SCAN_START: u64 = 7;

pub const DEFAULT_BUDGET_SECONDS: f64 = 300.0;

pub const CSV_HEADER: &str = "limit,method,wall_seconds,primes_scanned,predicted_cost,status";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("estimated {estimated_seconds:.3e} s exceeds the {budget_seconds} s budget")]
    BudgetExceeded {
        estimated_seconds: f64,
        budget_seconds: f64,
    },
    #[error("limit {0} is outside the scannable range")]
    LimitOutOfRange(u64),
    #[error("scan failed: {0}")]
    Search(String),
}

/// Abstract operation count from the cumulative cost model: `n^2/2 (ln n - 1/2)`
/// for the direct sum and `n (ln n - 1)` for the quotient routes. Only ratios
/// are meaningful.
pub fn predicted_cost(method: MethodKind, n: f64) -> f64 {
    let ln = n.ln();
    match method {
        MethodKind::DirectSum => n * n / 2.0 * (ln - 0.5),
        MethodKind::LehmerFQ | MethodKind::Base432FQ => n * (ln - 1.0),
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub budget_seconds: f64,
    pub shard_count: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            budget_seconds: DEFAULT_BUDGET_SECONDS,
            shard_count: 1,
        }
    }
}

/// Measured per-unit costs on this machine, used to estimate run times
/// before committing to them.
#[derive(Debug, Clone, Copy)]
pub struct Calibration {
    pub seconds_per_term: f64,
    pub seconds_per_quotient: f64,
}

impl Calibration {
    pub fn measure() -> Self {
        let inst = HarmonicInstance::new(10_000_019, 6).expect("prime");
        let t = Instant::now();
        let _ = congruence::harmonic_residue_direct(&inst);
        let seconds_per_term = t.elapsed().as_secs_f64() / inst.m() as f64;

        let p = (1u64 << 40..).find(|&x| is_prime(x)).expect("prime exists");
        const REPS: u32 = 2000;
        let t = Instant::now();
        for _ in 0..REPS {
            let _ = congruence::residue_432(std::hint::black_box(p));
        }
        let seconds_per_quotient = t.elapsed().as_secs_f64() / REPS as f64;
        Self {
            seconds_per_term,
            seconds_per_quotient,
        }
    }

    /// Rough wall-time estimate for scanning `[7, limit)`.
    pub fn estimate_seconds(&self, method: MethodKind, limit: u64) -> f64 {
        let n = limit as f64;
        let ln = n.ln().max(1.0);
        match method {
            // sum over primes p < n of p/6 ~ n^2 / (12 ln n)
            MethodKind::DirectSum => n * n / (12.0 * ln) * self.seconds_per_term,
            MethodKind::Base432FQ => n / ln * self.seconds_per_quotient,
            MethodKind::LehmerFQ => 2.0 * n / ln * self.seconds_per_quotient,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Timing {
    pub wall_seconds: f64,
    pub primes_scanned: u64,
    pub zeros: Vec<u64>,
}

/// Scans `[7, limit)` with `method`, refusing runs estimated to exceed the budget.
pub fn time_method(
    method: MethodKind,
    limit: u64,
    config: &BenchConfig,
    calibration: &Calibration,
) -> Result<Timing, BenchError> {
    if limit <= SCAN_START || limit > SIEVE_CEILING {
        return Err(BenchError::LimitOutOfRange(limit));
    }
    let estimated_seconds = calibration.estimate_seconds(method, limit);
    if estimated_seconds > config.budget_seconds {
        return Err(BenchError::BudgetExceeded {
            estimated_seconds,
            budget_seconds: config.budget_seconds,
        });
    }
    let spec = SearchSpec::new(6, method, SCAN_START, limit).with_shards(config.shard_count);
    let t = Instant::now();
    let out = run_search_until(&spec, None).map_err(|e| BenchError::Search(e.to_string()))?;
    let wall_seconds = t.elapsed().as_secs_f64().max(1e-9);
    Ok(Timing {
        wall_seconds,
        primes_scanned: out.primes_scanned,
        zeros: out.zeros.iter().map(|z| z.p).collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok(Timing),
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub limit: u64,
    pub method: MethodKind,
    pub predicted_cost: f64,
    pub status: RowStatus,
}

impl BenchRow {
    pub fn timing(&self) -> Option<&Timing> {
        match &self.status {
            RowStatus::Ok(t) => Some(t),
            RowStatus::Skipped(_) => None,
        }
    }

    pub fn is_skipped(&self) -> bool {
        matches!(self.status, RowStatus::Skipped(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub environment: String,
}

impl BenchReport {
    pub fn row(&self, limit: u64, method: MethodKind) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.limit == limit && r.method == method)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let (wall, primes, status) = match &row.status {
                RowStatus::Ok(t) => (format!("{:.6}", t.wall_seconds), t.primes_scanned.to_string(), "ok"),
                RowStatus::Skipped(_) => (String::new(), String::new(), "skipped"),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{:.6e},{}",
                row.limit, row.method, wall, primes, row.predicted_cost, status
            );
        }
        out
    }
}

pub fn environment_description() -> String {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!(
        "{}-{}, {} hardware threads",
        std::env::consts::OS,
        std::env::consts::ARCH,
        threads
    )
}

/// One row per `(limit, method)` pair, in that nesting order.
pub fn compare_methods(limits: &[u64], methods: &[MethodKind], config: &BenchConfig) -> BenchReport {
    let calibration = Calibration::measure();
    compare_methods_with(limits, methods, config, &calibration)
}

pub fn compare_methods_with(
    limits: &[u64],
    methods: &[MethodKind],
    config: &BenchConfig,
    calibration: &Calibration,
) -> BenchReport {
    let mut rows = Vec::with_capacity(limits.len() * methods.len());
    for &limit in limits {
        for &method in methods {
            let status = match time_method(method, limit, config, calibration) {
                Ok(t) => RowStatus::Ok(t),
                Err(e) => RowStatus::Skipped(e.to_string()),
            };
            rows.push(BenchRow {
                limit,
                method,
                predicted_cost: predicted_cost(method, limit as f64),
                status,
            });
        }
    }
    BenchReport {
        rows,
        environment: environment_description(),
    }
}
