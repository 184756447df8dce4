//! Similarity-based plaintext attack: when the attacker cannot reproduce
//! the channel bit-exactly (unknown quantization tables, platform-side
//! processing), pair generated plain-block variants with cipher blocks
//! greedily by smallest squared distance.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigUint;
use num_traits::One;

use rayon::prelude::*;

use crate::attacks::kpa::{WElement, WEstimate};
use crate::cipher::{Scheme, WEntry};
use crate::error::{Error, Result};
use crate::imgcore::{
    enumerate_variants, flatten, rgb_to_ycbcr, split_blocks, transform_block, Block, BlockState,
    PlanarImage,
};

/// Candidates kept per generated variant before recomputing a row.
const SHORTLIST: usize = 12;

struct VariantSet {
    /// Flat pixel data per variant.
    data: Vec<Vec<u8>>,
    /// Source plain block of each variant.
    source: Vec<u32>,
    /// (k, c) labels of each variant.
    label: Vec<(u8, u8)>,
}

fn plain_variants(plain: &PlanarImage, scheme: Scheme) -> Result<(VariantSet, usize)> {
    let mut data = Vec::new();
    let mut source = Vec::new();
    let mut label = Vec::new();
    let n;
    match scheme {
        Scheme::Etcs => {
            let flat = flatten(&rgb_to_ycbcr(plain)?)?;
            let (blocks, grid) = split_blocks(&flat, 8, 8)?;
            n = grid.n;
            for (i, b) in blocks.iter().enumerate() {
                for (k, vb) in enumerate_variants(b)?.into_iter().enumerate() {
                    data.push(vb.data().to_vec());
                    source.push(i as u32);
                    label.push((k as u8, 0));
                }
            }
        }
        Scheme::Etc => {
            let (blocks, grid) = split_blocks(plain, 16, 16)?;
            n = grid.n;
            for (i, b) in blocks.iter().enumerate() {
                for k in 0..16u8 {
                    for c in 0..6u8 {
                        let st = BlockState::from_variant_index(k).with_cperm(c);
                        data.push(transform_block(b, st)?.data().to_vec());
                        source.push(i as u32);
                        label.push((k, c));
                    }
                }
            }
        }
    }
    Ok((VariantSet { data, source, label }, n))
}

fn squared_distance(a: &[u8], b: &[u8]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum()
}

fn shortlist(variant: &[u8], ciphers: &[Block], alive: Option<&[bool]>) -> Vec<(u64, u32)> {
    let mut best: Vec<(u64, u32)> = Vec::with_capacity(SHORTLIST + 1);
    for (ci, cb) in ciphers.iter().enumerate() {
        if let Some(flags) = alive {
            if !flags[ci] {
                continue;
            }
        }
        let d = squared_distance(variant, cb.data());
        let cand = (d, ci as u32);
        if best.len() == SHORTLIST && cand >= *best.last().unwrap() {
            continue;
        }
        let pos = best.partition_point(|e| *e <= cand);
        best.insert(pos, cand);
        best.truncate(SHORTLIST);
    }
    best
}

/// Recover the equivalent key by greedy nearest-pair selection: repeatedly
/// take the globally closest (generated variant, cipher block) pair, retire
/// every variant of that plain block and the chosen cipher block, and
/// continue until all blocks are claimed. The result is always a valid
/// partial injection between plain and cipher blocks.
pub fn kpa_similarity(
    plain: &PlanarImage,
    cipher: &PlanarImage,
    scheme: Scheme,
) -> Result<WEstimate> {
    if plain.channels() != 3 {
        return Err(Error::invalid("expected a color plain-image"));
    }
    let (variants, n) = plain_variants(plain, scheme)?;
    let block = match scheme {
        Scheme::Etcs => 8,
        Scheme::Etc => 16,
    };
    let (cipher_blocks, cgrid) = split_blocks(cipher, block, block)?;
    if cgrid.n != n {
        return Err(Error::invalid("plain and cipher block counts differ"));
    }

    // Per-variant shortlists, then a lazy-deletion heap over their heads.
    let lists: Vec<Vec<(u64, u32)>> = variants
        .data
        .par_iter()
        .map(|v| shortlist(v, &cipher_blocks, None))
        .collect();

    let mut heads: Vec<usize> = vec![0; lists.len()];
    let mut lists = lists;
    let mut heap: BinaryHeap<Reverse<(u64, u32, u32)>> = lists
        .iter()
        .enumerate()
        .filter_map(|(vi, l)| l.first().map(|&(d, ci)| Reverse((d, vi as u32, ci))))
        .collect();

    let mut plain_alive = vec![true; n];
    let mut cipher_alive = vec![true; n];
    let mut elements = vec![WElement::Candidates(Vec::new()); n];
    let mut remaining = n;

    while remaining > 0 {
        let Reverse((d, vi, ci)) = match heap.pop() {
            Some(top) => top,
            None => break,
        };
        let src = variants.source[vi as usize] as usize;
        if !plain_alive[src] {
            continue;
        }
        if !cipher_alive[ci as usize] {
            // Advance this variant's shortlist, recomputing against the
            // still-alive cipher blocks when it runs dry.
            let head = &mut heads[vi as usize];
            *head += 1;
            if *head >= lists[vi as usize].len() {
                lists[vi as usize] =
                    shortlist(&variants.data[vi as usize], &cipher_blocks, Some(&cipher_alive));
                *head = 0;
            }
            if let Some(&(nd, nci)) = lists[vi as usize].get(*head) {
                debug_assert!(nd >= d);
                heap.push(Reverse((nd, vi, nci)));
            }
            continue;
        }
        // Claim the pair.
        let (k, c) = variants.label[vi as usize];
        elements[src] = WElement::Determined(WEntry { position: ci as usize, k, c });
        plain_alive[src] = false;
        cipher_alive[ci as usize] = false;
        remaining -= 1;
    }

    Ok(WEstimate {
        elements,
        candidate_count: BigUint::one(),
        has_color: scheme == Scheme::Etc,
    })
}
