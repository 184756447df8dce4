//! Deterministic per-key pseudorandom sequences driving both schemes.
//!
//! Each subkey seeds its own keyed counter-mode generator (ChaCha with a
//! domain-separation tag), and every bounded value is drawn by rejection
//! sampling so the stated ranges carry no modulo bias.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// The secret key: three 64-bit integer subkeys. The first drives block
/// permutation, the second rotation/inversion, the third the
/// negative-positive bits (and, for the color scheme, channel shuffling).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Key {
    pub k1: u64,
    pub k2: u64,
    pub k3: u64,
}

impl Key {
    pub fn new(k1: u64, k2: u64, k3: u64) -> Self {
        Key { k1, k2, k3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Grayscale-like scheme: flattened 3WxH plane, 8x8 single-channel blocks.
    Etcs,
    /// Conventional color scheme: 16x16 RGB blocks with channel shuffling.
    Etc,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Etcs => "etcs",
            Scheme::Etc => "etc",
        }
    }
}

/// The expanded pseudorandom sequences for one image of `n` blocks.
#[derive(Debug, Clone)]
pub struct KeyStream {
    /// Swap targets, each in [0, n-1].
    pub s: Vec<usize>,
    /// (rotation, inversion-direction) pairs, each component in [0, 3].
    pub rf: Vec<(u8, u8)>,
    /// Negative-positive bits.
    pub t: Vec<bool>,
    /// Channel-permutation indices in [0, 5]; present for the color scheme.
    pub cperm: Option<Vec<u8>>,
}

fn seeded(subkey: u64, domain: &[u8; 8]) -> ChaCha12Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&subkey.to_le_bytes());
    seed[8..16].copy_from_slice(domain);
    ChaCha12Rng::from_seed(seed)
}

/// Unbiased draw from [0, bound) by rejecting the tail of the u64 range.
fn uniform(rng: &mut ChaCha12Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % bound;
        }
    }
}

/// Expand a key into the per-block sequences for `n` blocks.
pub fn keystream(key: &Key, n: usize, scheme: Scheme) -> KeyStream {
    let mut perm_rng = seeded(key.k1, b"blkperm\0");
    let mut rf_rng = seeded(key.k2, b"rotflip\0");
    let mut t_rng = seeded(key.k3, b"negpos\0\0");

    let s = (0..n).map(|_| uniform(&mut perm_rng, n as u64) as usize).collect();
    let rf = (0..n)
        .map(|_| (uniform(&mut rf_rng, 4) as u8, uniform(&mut rf_rng, 4) as u8))
        .collect();
    let t = (0..n).map(|_| uniform(&mut t_rng, 2) == 1).collect();
    let cperm = match scheme {
        Scheme::Etcs => None,
        Scheme::Etc => {
            let mut c_rng = seeded(key.k3, b"chshufl\0");
            Some((0..n).map(|_| uniform(&mut c_rng, 6) as u8).collect())
        }
    };
    KeyStream { s, rf, t, cperm }
}
