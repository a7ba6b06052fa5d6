//! Command-line front end.
//!
//! Exit codes: 0 success (including searches with no finds), 1 a verified
//! residue is nonzero, 2 usage or configuration error, 3 checkpoint error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{self, BenchConfig};
use crate::congruence::{self, HarmonicInstance, MethodKind};
use crate::search::{self, SearchError, SearchSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NONZERO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CHECKPOINT: i32 = 3;

/// `verify` includes the direct sum by default only up to this many terms.
pub const VERIFY_DIRECT_DEFAULT_MAX_TERMS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Direct,
    Lehmer,
    Fq432,
}

impl From<MethodArg> for MethodKind {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Direct => MethodKind::DirectSum,
            MethodArg::Lehmer => MethodKind::LehmerFQ,
            MethodArg::Fq432 => MethodKind::Base432FQ,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hquot", version, about = "Find primes p with H(floor(p/N)) == 0 (mod p)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scan a range of primes for zeros.
    Search {
        #[arg(long = "n", default_value_t = 6)]
        n: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Fq432)]
        method: MethodArg,
        #[arg(long, default_value_t = 7)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, default_value_t = 1)]
        shards: usize,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Evaluate one candidate under several methods.
    Verify {
        #[arg(long)]
        p: u64,
        #[arg(long = "n", default_value_t = 6)]
        n: u64,
        #[arg(long, value_enum, value_delimiter = ',')]
        methods: Vec<MethodArg>,
    },
    /// Print the residue of one candidate.
    Residue {
        #[arg(long)]
        p: u64,
        #[arg(long = "n", default_value_t = 6)]
        n: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Fq432)]
        method: MethodArg,
    },
    /// Time the methods against each other.
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        limits: Vec<u64>,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [MethodArg::Direct, MethodArg::Fq432])]
        methods: Vec<MethodArg>,
        #[arg(long = "budget-seconds", default_value_t = 300)]
        budget_seconds: u64,
        /// Worker threads per timing run (1 = single-threaded timings).
        #[arg(long, default_value_t = 1)]
        shards: usize,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Search {
            n,
            method,
            from,
            to,
            shards,
            checkpoint,
            out,
        } => cmd_search(n, method.into(), from, to, shards, checkpoint, &out, stdout),
        Command::Verify { p, n, methods } => cmd_verify(p, n, &methods, stdout),
        Command::Residue { p, n, method } => cmd_residue(p, n, method.into(), stdout),
        Command::Bench {
            limits,
            methods,
            budget_seconds,
            shards,
            out,
        } => cmd_bench(&limits, &methods, budget_seconds, shards, &out, stdout, stderr),
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            let _ = writeln!(stderr, "error: {message}");
            code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        let code = match e {
            SearchError::CheckpointMismatch { .. } | SearchError::CheckpointCorrupt(_) | SearchError::Io(_) => {
                EXIT_CHECKPOINT
            }
            SearchError::VerificationFailed { .. } => EXIT_NONZERO,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn open_output<'a>(out: &str, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, Failure> {
    if out == "-" {
        Ok(Box::new(stdout))
    } else {
        File::create(out)
            .map(|f| Box::new(io::BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| usage(format!("cannot open {out}: {e}")))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    n: u64,
    method: MethodKind,
    from: u64,
    to: u64,
    shards: usize,
    checkpoint: Option<PathBuf>,
    out: &str,
    stdout: &mut dyn Write,
) -> Result<i32, Failure> {
    if n == 6 && from < 7 {
        return Err(usage("--from may not be below 7 for N = 6"));
    }
    let mut spec = SearchSpec::new(n, method, from, to).with_shards(shards);
    spec.checkpoint_path = checkpoint;
    spec.validate()?;
    let zeros = search::run_search(&spec)?;
    let mut sink = open_output(out, stdout)?;
    for z in &zeros {
        writeln!(sink, "{z}").map_err(|e| usage(format!("write failed: {e}")))?;
    }
    sink.flush().map_err(|e| usage(format!("write failed: {e}")))?;
    Ok(EXIT_OK)
}

/// Methods `verify` runs when none are named.
pub fn default_verify_methods(p: u64, n: u64) -> Vec<MethodKind> {
    if n != 6 {
        return vec![MethodKind::DirectSum];
    }
    let mut methods = Vec::new();
    if p / n <= VERIFY_DIRECT_DEFAULT_MAX_TERMS {
        methods.push(MethodKind::DirectSum);
    }
    methods.extend([MethodKind::LehmerFQ, MethodKind::Base432FQ]);
    methods
}

fn cmd_verify(p: u64, n: u64, methods: &[MethodArg], stdout: &mut dyn Write) -> Result<i32, Failure> {
    let methods: Vec<MethodKind> = if methods.is_empty() {
        default_verify_methods(p, n)
    } else {
        methods.iter().map(|&m| m.into()).collect()
    };
    let report = search::verify_single(p, n, &methods)?;
    for r in &report.residues {
        writeln!(stdout, "method={} residue={}", r.method, r.residue).map_err(usage)?;
    }
    Ok(if report.all_zero() { EXIT_OK } else { EXIT_NONZERO })
}

fn cmd_residue(p: u64, n: u64, method: MethodKind, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let inst = HarmonicInstance::new(p, n).map_err(usage)?;
    let r = congruence::residue(&inst, method).map_err(usage)?;
    writeln!(stdout, "{r}").map_err(usage)?;
    Ok(EXIT_OK)
}

fn cmd_bench(
    limits: &[u64],
    methods: &[MethodArg],
    budget_seconds: u64,
    shards: usize,
    out: &str,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    if shards == 0 || shards > search::MAX_SHARDS {
        return Err(usage(format!("--shards must be in 1..={}", search::MAX_SHARDS)));
    }
    let methods: Vec<MethodKind> = methods.iter().map(|&m| m.into()).collect();
    let config = BenchConfig {
        budget_seconds: budget_seconds as f64,
        shard_count: shards,
    };
    let report = bench::compare_methods(limits, &methods, &config);
    let _ = writeln!(stderr, "# environment: {}", report.environment);
    for row in &report.rows {
        if let bench::RowStatus::Skipped(why) = &row.status {
            let _ = writeln!(stderr, "# skipped limit={} method={}: {why}", row.limit, row.method);
        }
    }
    let mut sink = open_output(out, stdout)?;
    sink.write_all(report.to_csv().as_bytes())
        .and_then(|_| sink.flush())
        .map_err(|e| usage(format!("write failed: {e}")))?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("hquot").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn residue_examples() {
        assert_eq!(
            run_capture(&["residue", "--p", "13", "--method", "direct"]),
            (0, "8\n".into(), String::new())
        );
        assert_eq!(run_capture(&["residue", "--p", "7", "--method", "lehmer"]).1, "1\n");
        assert_eq!(run_capture(&["residue", "--p", "61"]).1, "0\n");
        assert_eq!(run_capture(&["residue", "--p", "60"]).0, EXIT_USAGE);
    }

    #[test]
    fn unknown_flags_and_help() {
        assert_eq!(run_capture(&["search", "--to", "100", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["search"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
        assert_eq!(
            run_capture(&["search", "--method", "fast", "--to", "100"]).0,
            EXIT_USAGE
        );
    }

    #[test]
    fn search_rejects_low_from_for_n6() {
        let (code, _, err) = run_capture(&["search", "--from", "5", "--to", "100"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.starts_with("error: "));
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn default_methods() {
        assert_eq!(default_verify_methods(61, 6), MethodKind::ALL.to_vec());
        assert_eq!(
            default_verify_methods(7_308_036_881, 6),
            vec![MethodKind::LehmerFQ, MethodKind::Base432FQ]
        );
        assert_eq!(default_verify_methods(7_308_036_881, 5), vec![MethodKind::DirectSum]);
    }
}
