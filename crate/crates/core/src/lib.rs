//! Cryptanalysis workbench for block-permutation encryption-then-compression
//! image ciphers: the two cipher variants, JPEG/OSN channel simulation,
//! pairwise compatibility scoring, a Kruskal-style jigsaw assembler, the
//! known-/chosen-plaintext attacks, and evaluation measures.

pub mod attacks;
pub mod cipher;
pub mod codec;
pub mod compat;
pub mod error;
pub mod eval;
pub mod imgcore;
pub mod solver;

pub use error::{Error, Result};

/// Fingerprint of the pinned conventions every report carries, so numbers
/// from different builds are only compared when the decisions match:
/// side numbering, variant indexing, swap semantics, tie-breaking,
/// aggregation order, and pose handling.
pub const DECISIONS_FINGERPRINT: &str =
    "sides=trbl;k=8t+4i+r;perm=seqswap;ties=lex;avg=raw-then-norm;pose=relative";
