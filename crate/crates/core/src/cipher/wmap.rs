//! The equivalent key: for every plaintext block, where it landed in the
//! cipher-image and which intra-block variant was applied to it.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// One equivalent-key element: plaintext block i moved to cipher position
/// `position` under variant `k` (and channel permutation `c` for the color
/// scheme).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WEntry {
    pub position: usize,
    pub k: u8,
    pub c: u8,
}

/// The full equivalent-key sequence, indexed by plaintext block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WMap {
    entries: Vec<WEntry>,
    pub has_color: bool,
}

impl WMap {
    pub fn new(entries: Vec<WEntry>, has_color: bool) -> Self {
        WMap { entries, has_color }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[WEntry] {
        &self.entries
    }

    pub fn entry(&self, plain_index: usize) -> WEntry {
        self.entries[plain_index]
    }

    /// Plaintext block currently sitting at a cipher position.
    pub fn plain_at_position(&self, position: usize) -> Option<usize> {
        self.entries.iter().position(|e| e.position == position)
    }

    /// Inverse lookup table: cipher position -> plaintext block.
    pub fn position_to_plain(&self) -> Vec<usize> {
        let mut inv = vec![0usize; self.entries.len()];
        for (plain, e) in self.entries.iter().enumerate() {
            inv[e.position] = plain;
        }
        inv
    }

    /// True when the positions form a permutation of 0..n-1.
    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.entries.len()];
        for e in &self.entries {
            if e.position >= self.entries.len() || seen[e.position] {
                return false;
            }
            seen[e.position] = true;
        }
        true
    }

    /// Line-oriented text form: `i i' k` or `i i' k c` per block.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.entries.iter().enumerate() {
            if self.has_color {
                let _ = writeln!(out, "{} {} {} {}", i, e.position, e.k, e.c);
            } else {
                let _ = writeln!(out, "{} {} {}", i, e.position, e.k);
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, WEntry)> = Vec::new();
        let mut has_color = false;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 && fields.len() != 4 {
                return Err(Error::Format(format!("line {}: expected 3 or 4 fields", lineno + 1)));
            }
            let parse = |s: &str| -> Result<usize> {
                s.parse().map_err(|_| Error::Format(format!("line {}: bad integer", lineno + 1)))
            };
            let i = parse(fields[0])?;
            let position = parse(fields[1])?;
            let k = parse(fields[2])? as u8;
            let c = if fields.len() == 4 {
                has_color = true;
                parse(fields[3])? as u8
            } else {
                0
            };
            entries.push((i, WEntry { position, k, c }));
        }
        entries.sort_by_key(|&(i, _)| i);
        for (expect, &(i, _)) in entries.iter().enumerate() {
            if i != expect {
                return Err(Error::Format(format!("missing or duplicate block index {expect}")));
            }
        }
        Ok(WMap::new(entries.into_iter().map(|(_, e)| e).collect(), has_color))
    }
}
