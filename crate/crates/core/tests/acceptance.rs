//! Acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line per
//! criterion; run with `--nocapture` to see them:
//!
//! ```text
//! cargo test -p hquot --test acceptance -- --nocapture
//! ```
//!
//! Tests share a lock so wall-clock measurements never overlap.

use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hquot::bench::{compare_methods, BenchConfig};
use hquot::congruence::{
    eisenstein_power_check, eisenstein_product_check, residue, residue_432, CongruenceError, HarmonicInstance,
    MethodKind, QuotientBase,
};
use hquot::primes::{is_prime, primes_in_range};
use hquot::search::{
    read_checkpoint, run_search, run_search_until, spec_digest, write_checkpoint, Checkpoint, SearchSpec,
};

static SERIAL: Mutex<()> = Mutex::new(());

fn criterion(id: u32, title: &str, check: impl FnOnce() -> Result<String, String>) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let outcome = check();
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => println!("[PASS] AC{id} {title}: {detail} ({secs:.2}s)"),
        Err(detail) => {
            println!("[FAIL] AC{id} {title}: {detail} ({secs:.2}s)");
            panic!("AC{id} failed: {detail}");
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Run {
    code: i32,
    stdout: String,
    elapsed: Duration,
}

fn hquot(args: &[&str]) -> Run {
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_hquot"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        elapsed: t.elapsed(),
    }
}

fn zero_primes(stdout: &str) -> Result<Vec<u64>, String> {
    stdout
        .lines()
        .map(|l| {
            let rest = l.strip_prefix("p=").ok_or_else(|| format!("bad line {l:?}"))?;
            let (p, _) = rest.split_once(' ').ok_or_else(|| format!("bad line {l:?}"))?;
            p.parse().map_err(|_| format!("bad p in {l:?}"))
        })
        .collect()
}

#[test]
fn ac1_known_zero_below_600000() {
    criterion(1, "search --n 6 --to 600000 returns exactly {61}", || {
        let r = hquot(&["search", "--n", "6", "--to", "600000"]);
        ensure(r.code == 0, || format!("exit {}", r.code))?;
        let zeros = zero_primes(&r.stdout)?;
        ensure(zeros == [61], || format!("got {zeros:?}"))?;
        ensure(r.elapsed < Duration::from_secs(5), || format!("took {:?}", r.elapsed))?;
        Ok(format!("{zeros:?} in {:.3}s", r.elapsed.as_secs_f64()))
    });
}

#[test]
fn ac2_second_zero_below_2000000() {
    criterion(2, "search --n 6 --to 2000000 returns exactly {61, 1680023}", || {
        let r = hquot(&["search", "--n", "6", "--to", "2000000"]);
        ensure(r.code == 0, || format!("exit {}", r.code))?;
        let zeros = zero_primes(&r.stdout)?;
        ensure(zeros == [61, 1_680_023], || format!("got {zeros:?}"))?;
        ensure(r.elapsed < Duration::from_secs(15), || format!("took {:?}", r.elapsed))?;
        Ok(format!("{zeros:?} in {:.3}s", r.elapsed.as_secs_f64()))
    });
}

#[test]
fn ac3_third_zero_spot_check() {
    criterion(3, "verify --p 7308036881 is zero under Base432FQ and LehmerFQ", || {
        let r = hquot(&["verify", "--p", "7308036881"]);
        ensure(r.code == 0, || format!("exit {}", r.code))?;
        for m in ["LehmerFQ", "Base432FQ"] {
            let line = format!("method={m} residue=0");
            ensure(r.stdout.lines().any(|l| l == line), || {
                format!("missing {line:?} in {:?}", r.stdout)
            })?;
        }
        ensure(r.elapsed < Duration::from_secs(1), || format!("took {:?}", r.elapsed))?;
        Ok(format!("{:.3}s", r.elapsed.as_secs_f64()))
    });
}

#[test]
fn ac4_method_equivalence_below_100000() {
    criterion(
        4,
        "DirectSum == LehmerFQ and Base432FQ == -2 DirectSum for 5 < p < 100000",
        || {
            let primes = primes_in_range(7, 100_000).map_err(|e| e.to_string())?.primes;
            for &p in &primes {
                let inst = HarmonicInstance::new(p, 6).map_err(|e| e.to_string())?;
                let direct = residue(&inst, MethodKind::DirectSum)
                    .map_err(|e| e.to_string())?
                    .value();
                let lehmer = residue(&inst, MethodKind::LehmerFQ).map_err(|e| e.to_string())?.value();
                let b432 = residue(&inst, MethodKind::Base432FQ)
                    .map_err(|e| e.to_string())?
                    .value();
                let p = p as u128;
                ensure(direct == lehmer, || {
                    format!("p={p}: direct {direct} != lehmer {lehmer}")
                })?;
                ensure(b432 == (p - (2 * direct) % p) % p, || {
                    format!("p={p}: base432 {b432}, direct {direct}")
                })?;
            }
            Ok(format!("{} primes", primes.len()))
        },
    );
}

#[test]
fn ac5_eisenstein_identities() {
    criterion(5, "product and power rules on 10^4 random instances", || {
        let mut rng = StdRng::seed_from_u64(432);
        let mut done = 0;
        while done < 10_000 {
            let p = rng.gen_range(2..1_000_000u64);
            if !is_prime(p) {
                continue;
            }
            let a = rng.gen_range(1..1u128 << 16);
            let b = rng.gen_range(1..1u128 << 16);
            let k = rng.gen_range(1..=8u32);
            if a % p as u128 == 0 || b % p as u128 == 0 {
                continue;
            }
            let prod = eisenstein_product_check(p, QuotientBase(a), QuotientBase(b)).map_err(|e| e.to_string())?;
            let pow = eisenstein_power_check(p, QuotientBase(a), k).map_err(|e| e.to_string())?;
            ensure(prod && pow, || {
                format!("p={p} a={a} b={b} k={k}: product {prod}, power {pow}")
            })?;
            done += 1;
        }
        Ok(format!("{done} instances"))
    });
}

#[test]
fn ac6_general_divisor_negative_results() {
    criterion(6, "no zeros below 10^6 for N in {5,12,17,18,20,29,31,43}", || {
        let mut detail = Vec::new();
        for n in [5, 12, 17, 18, 20, 29, 31, 43] {
            let r = hquot(&["search", "--n", &n.to_string(), "--method", "direct", "--to", "1000000"]);
            ensure(r.code == 0, || format!("N={n}: exit {}", r.code))?;
            ensure(r.stdout.is_empty(), || format!("N={n}: found {:?}", r.stdout))?;
            detail.push(format!("N={n} {:.1}s", r.elapsed.as_secs_f64()));
        }
        Ok(detail.join(", "))
    });
}

#[test]
fn ac7_fischer_edge_case() {
    criterion(7, "q_5(432) == 0 but p = 5 is never an N = 6 zero", || {
        let r5 = residue_432(5).map_err(|e| e.to_string())?;
        ensure(r5.is_zero(), || format!("residue_432(5) = {r5}"))?;
        ensure(
            HarmonicInstance::new(5, 6) == Err(CongruenceError::VacuousSum { p: 5, n: 6 }),
            || "p = 5 accepted as an N = 6 instance".into(),
        )?;
        let zeros: Vec<u64> = run_search(&SearchSpec::new(6, MethodKind::Base432FQ, 2, 100))
            .map_err(|e| e.to_string())?
            .iter()
            .map(|z| z.p)
            .collect();
        ensure(zeros == [61], || format!("scan from 2 reported {zeros:?}"))?;
        let cli = hquot(&["search", "--from", "5", "--to", "100"]);
        ensure(cli.code == 2, || format!("--from 5 exit {}", cli.code))?;
        Ok("residue_432(5) = 0; scans report only 61".into())
    });
}

#[test]
fn ac8_benchmark_shape() {
    criterion(
        8,
        "DirectSum >= 20x fq432 at 600000; DirectSum grows faster; 10^12 skipped",
        || {
            let (n1, n2) = (600_000u64, 1_680_023u64);
            let report = compare_methods(
                &[n1, n2],
                &[MethodKind::DirectSum, MethodKind::Base432FQ],
                &BenchConfig::default(),
            );
            let t = |n, m| {
                report
                    .row(n, m)
                    .and_then(|r| r.timing())
                    .cloned()
                    .ok_or_else(|| format!("row ({n}, {m}) missing or skipped: {:?}", report.row(n, m)))
            };
            let (d1, d2) = (t(n1, MethodKind::DirectSum)?, t(n2, MethodKind::DirectSum)?);
            let (f1, f2) = (t(n1, MethodKind::Base432FQ)?, t(n2, MethodKind::Base432FQ)?);
            // timing runs scan [7, limit), so 1680023 itself is outside the second range
            for (limit, timing) in [(n1, &d1), (n1, &f1), (n2, &d2), (n2, &f2)] {
                ensure(timing.zeros == [61], || {
                    format!("limit {limit} zeros {:?}", timing.zeros)
                })?;
            }
            let speedup = d1.wall_seconds / f1.wall_seconds;
            ensure(speedup >= 20.0, || format!("speedup at {n1} only {speedup:.1}x"))?;
            let direct_growth = d2.wall_seconds / d1.wall_seconds;
            let fq_growth = f2.wall_seconds / f1.wall_seconds;
            ensure(direct_growth > fq_growth, || {
                format!("DirectSum grew {direct_growth:.2}x, fq432 grew {fq_growth:.2}x")
            })?;
            let skip = hquot(&["bench", "--limits", "1000000000000", "--methods", "direct"]);
            ensure(skip.code == 0, || format!("bench exit {}", skip.code))?;
            let row = skip.stdout.lines().nth(1).unwrap_or_default();
            ensure(
                row.starts_with("1000000000000,DirectSum,") && row.ends_with(",skipped"),
                || format!("row {row:?}"),
            )?;
            Ok(format!(
            "DirectSum {:.2}s/{:.2}s, fq432 {:.4}s/{:.4}s, speedup {speedup:.0}x, growth {direct_growth:.2}x vs {fq_growth:.2}x",
            d1.wall_seconds, d2.wall_seconds, f1.wall_seconds, f2.wall_seconds
        ))
        },
    );
}

#[test]
fn ac9_infrastructure_properties() {
    criterion(
        9,
        "shard invariance, resume transparency, checkpoint round trip, sieve vs trial division",
        || {
            // shard-count invariance, byte for byte
            let one = hquot(&["search", "--to", "2000000", "--shards", "1"]);
            let eight = hquot(&["search", "--to", "2000000", "--shards", "8"]);
            ensure(one.code == 0 && eight.code == 0, || "search failed".into())?;
            ensure(one.stdout == eight.stdout, || {
                format!("{:?} vs {:?}", one.stdout, eight.stdout)
            })?;

            // resume transparency at three split points
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let plain = SearchSpec::new(6, MethodKind::Base432FQ, 7, 2_000_000).with_segment_width(1 << 17);
            let want = run_search(&plain).map_err(|e| e.to_string())?;
            for (i, split) in [61u64, 700_001, 1_680_024].into_iter().enumerate() {
                let path = dir.path().join(format!("split{i}.ckpt"));
                let spec = plain.clone().with_checkpoint(&path);
                let first = run_search_until(&spec, Some(split)).map_err(|e| e.to_string())?;
                ensure(first.next == split, || format!("halted at {} not {split}", first.next))?;
                let cp = read_checkpoint(&path).map_err(|e| e.to_string())?;
                ensure(cp.next == split, || format!("checkpoint next {}", cp.next))?;
                let resumed = run_search(&spec).map_err(|e| e.to_string())?;
                ensure(resumed == want, || format!("split {split}: {resumed:?} vs {want:?}"))?;
            }

            // checkpoint round trip
            let path = dir.path().join("roundtrip.ckpt");
            let cp = Checkpoint {
                spec_digest: spec_digest(6, MethodKind::Base432FQ, 7, 7_400_000_000),
                next: 7_308_036_882,
                zeros: vec![61, 1_680_023, 7_308_036_881],
            };
            write_checkpoint(&cp, &path).map_err(|e| e.to_string())?;
            let back = read_checkpoint(&path).map_err(|e| e.to_string())?;
            ensure(back == cp, || format!("{back:?} != {cp:?}"))?;

            // segmented sieve against trial division below 10^6
            let sieved = primes_in_range(0, 1_000_000).map_err(|e| e.to_string())?.primes;
            let trial: Vec<u64> = (0..1_000_000u64)
                .filter(|&n| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
                .collect();
            ensure(sieved == trial, || "sieve disagrees with trial division".into())?;
            Ok(format!("{} primes below 10^6", sieved.len()))
        },
    );
}
