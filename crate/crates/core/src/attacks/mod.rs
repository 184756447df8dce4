//! The three attack drivers: ciphertext-only orchestration, the exact
//! known-plaintext attack, its similarity-based fallback, and chosen
//! plain-image construction.

mod coa;
mod cpa;
mod kpa;
mod similarity;

pub use coa::{coa, CoaOptions, CoaResult};
pub use cpa::{cpa_construct, cpa_refine, variants_distinct};
pub use kpa::{
    flattened_blocks, kpa_candidates, kpa_exact, kpa_probability, w_accuracy, KpaProbability,
    WElement, WEstimate,
};
pub use similarity::kpa_similarity;
