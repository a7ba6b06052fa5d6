//! Line-oriented checkpoint files.
//!
//! ```text
//! hquot-checkpoint v1
//! digest=<16 lowercase hex>
//! next=<decimal>
//! zeros=<comma-separated decimals, possibly empty>
//! ```
//!
//! Every line, including the last, ends in `\n`.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::SearchError;
use crate::congruence::MethodKind;

const MAGIC: &str = "hquot-checkpoint v1";

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// Digest binding a checkpoint to the search parameters that produced it.
pub fn spec_digest(n: u64, method: MethodKind, from: u64, to: u64) -> u64 {
    fnv1a64(format!("N:{n};method:{};from:{from};to:{to}", method.name()).as_bytes())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub spec_digest: u64,
    /// Smallest integer not yet scanned.
    pub next: u64,
    /// Zeros below `next`, strictly increasing.
    pub zeros: Vec<u64>,
}

impl Checkpoint {
    pub const VERSION: u32 = 1;

    pub fn encode(&self) -> String {
        let zeros: Vec<String> = self.zeros.iter().map(u64::to_string).collect();
        format!(
            "{MAGIC}\ndigest={:016x}\nnext={}\nzeros={}\n",
            self.spec_digest,
            self.next,
            zeros.join(",")
        )
    }

    pub fn decode(text: &str) -> Result<Self, SearchError> {
        let corrupt = |why: &str| SearchError::CheckpointCorrupt(why.to_string());
        let body = text
            .strip_suffix('\n')
            .ok_or_else(|| corrupt("missing trailing newline"))?;
        let lines: Vec<&str> = body.split('\n').collect();
        let [magic, digest, next, zeros] = lines[..] else {
            return Err(corrupt("expected exactly four lines"));
        };
        if magic != MAGIC {
            return Err(corrupt("bad magic line"));
        }
        let digest = digest
            .strip_prefix("digest=")
            .ok_or_else(|| corrupt("bad digest line"))?;
        if digest.len() != 16 || !digest.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
            return Err(corrupt("digest must be 16 lowercase hex digits"));
        }
        let spec_digest = u64::from_str_radix(digest, 16).map_err(|_| corrupt("bad digest"))?;
        let next = parse_decimal(next.strip_prefix("next=").ok_or_else(|| corrupt("bad next line"))?)
            .ok_or_else(|| corrupt("bad next value"))?;
        let zeros = zeros.strip_prefix("zeros=").ok_or_else(|| corrupt("bad zeros line"))?;
        let zeros = if zeros.is_empty() {
            Vec::new()
        } else {
            zeros
                .split(',')
                .map(parse_decimal)
                .collect::<Option<Vec<u64>>>()
                .ok_or_else(|| corrupt("bad zeros value"))?
        };
        if zeros.windows(2).any(|w| w[0] >= w[1]) {
            return Err(corrupt("zeros not strictly increasing"));
        }
        if zeros.last().is_some_and(|&z| z >= next) {
            return Err(corrupt("zero at or beyond next"));
        }
        Ok(Self {
            spec_digest,
            next,
            zeros,
        })
    }
}

fn parse_decimal(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Writes to a sibling temporary file, then renames over `path`.
pub fn write_checkpoint(cp: &Checkpoint, path: &Path) -> Result<(), SearchError> {
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(cp.encode().as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint, SearchError> {
    let bytes = fs::read(path)?;
    let text = String::from_utf8(bytes).map_err(|_| SearchError::CheckpointCorrupt("not UTF-8".into()))?;
    Checkpoint::decode(&text)
}
