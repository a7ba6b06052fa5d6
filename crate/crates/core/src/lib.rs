//! Searching for primes `p` with `H(floor(p/N)) == 0 (mod p)`.
//!
//! The crate evaluates harmonic residues two ways: by summing reciprocals
//! directly, and (for `N = 6`) through Fermat quotients, where the whole
//! computation collapses to a single exponentiation `q_p(432)` modulo `p^2`.
//!
//! ```
//! use hquot::congruence::{residue, HarmonicInstance, MethodKind};
//!
//! let inst = HarmonicInstance::new(61, 6).unwrap();
//! assert!(residue(&inst, MethodKind::Base432FQ).unwrap().is_zero());
//! assert!(residue(&inst, MethodKind::DirectSum).unwrap().is_zero());
//! ```

pub mod bench;
pub mod cli;
pub mod congruence;
pub mod modmath;
pub mod primes;
pub mod search;

pub use congruence::{HarmonicInstance, MethodKind, QuotientBase};
pub use modmath::{Modulus, Residue};
pub use search::{run_search, SearchSpec, ZeroRecord};
