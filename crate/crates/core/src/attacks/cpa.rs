//! Chosen plain-image construction: produce an image whose 16n channel-block
//! variants stay pairwise distinct after the lossy round trip, so the exact
//! plaintext attack pins every equivalent-key element from one pair.
//!
//! All lossy steps run in one direction only: blocks are generated in RGB,
//! converted, transformed, and round-tripped exactly the way the cipher
//! pipeline will see them.

use std::collections::HashSet;

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::codec::{jpeg_roundtrip, CodecProfile};
use crate::error::{Error, Result};
use crate::imgcore::{
    enumerate_variants, flatten, rgb_to_ycbcr, split_blocks, Block, PlanarImage,
};

const BLOCK: usize = 8;

/// The 16 channel-variant images of one 8x8 block as they leave the
/// channel: transform first, then the per-block round trip (blocks are
/// quantized independently, so this equals the full-image path).
fn channel_variants(block: &Block, profile: &CodecProfile) -> Result<Vec<Vec<u8>>> {
    enumerate_variants(block)?
        .into_iter()
        .map(|vb| {
            let img = PlanarImage::new(BLOCK, BLOCK, 1, vb.data().to_vec())?;
            Ok(jpeg_roundtrip(&img, profile)?.into_samples())
        })
        .collect()
}

/// All post-channel variants of every channel block of an RGB image.
fn image_variants(img: &PlanarImage, profile: &CodecProfile) -> Result<Vec<Vec<Vec<u8>>>> {
    let flat = flatten(&rgb_to_ycbcr(img)?)?;
    let (blocks, _) = split_blocks(&flat, BLOCK, BLOCK)?;
    blocks.iter().map(|b| channel_variants(b, profile)).collect()
}

/// True when all 16n post-channel variants are pairwise distinct. This is
/// the defining property a chosen plain-image must satisfy; recomputed from
/// scratch each call.
pub fn variants_distinct(img: &PlanarImage, profile: &CodecProfile) -> Result<bool> {
    let mut seen = HashSet::new();
    for variants in image_variants(img, profile)? {
        for v in variants {
            if !seen.insert(v) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The three channel blocks of one RGB block, via the standard conversion.
fn rgb_block_channels(rgb: &Block) -> Result<[Block; 3]> {
    let img = PlanarImage::new(BLOCK, BLOCK, 3, rgb.data().to_vec())?;
    let conv = rgb_to_ycbcr(&img)?;
    Ok([
        Block::new(BLOCK, BLOCK, 1, conv.plane(0).to_vec())?,
        Block::new(BLOCK, BLOCK, 1, conv.plane(1).to_vec())?,
        Block::new(BLOCK, BLOCK, 1, conv.plane(2).to_vec())?,
    ])
}

/// Accept an RGB block if the 48 post-channel variants of its three channel
/// blocks collide neither with the recorded set nor among themselves.
fn try_accept(
    rgb: &Block,
    profile: &CodecProfile,
    seen: &mut HashSet<Vec<u8>>,
) -> Result<bool> {
    let mut fresh: Vec<Vec<u8>> = Vec::with_capacity(48);
    for ch_block in rgb_block_channels(rgb)? {
        for v in channel_variants(&ch_block, profile)? {
            if seen.contains(&v) || fresh.contains(&v) {
                return Ok(false);
            }
            fresh.push(v);
        }
    }
    for v in fresh {
        seen.insert(v);
    }
    Ok(true)
}

/// Build a chosen plain-image of the given size from random blocks,
/// regenerating any block whose variants collide. Deterministic per seed.
pub fn cpa_construct(
    width: usize,
    height: usize,
    profile: &CodecProfile,
    seed: u64,
) -> Result<PlanarImage> {
    if width % BLOCK != 0 || height % BLOCK != 0 {
        return Err(Error::invalid("dimensions must be multiples of the block size"));
    }
    let needed = (width / BLOCK) * (height / BLOCK);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut accepted: Vec<Block> = Vec::with_capacity(needed);
    let mut attempts = 0usize;
    let budget = needed * 1000;
    while accepted.len() < needed {
        attempts += 1;
        if attempts > budget {
            return Err(Error::Exhausted(format!(
                "could not find {needed} collision-free blocks in {budget} attempts"
            )));
        }
        let data: Vec<u8> = (0..3 * BLOCK * BLOCK).map(|_| rng.next_u32() as u8).collect();
        let rgb = Block::new(BLOCK, BLOCK, 3, data)?;
        if try_accept(&rgb, profile, &mut seen)? {
            accepted.push(rgb);
        }
    }
    let grid = crate::imgcore::BlockGrid {
        block_width: BLOCK,
        block_height: BLOCK,
        x: width / BLOCK,
        y: height / BLOCK,
        n: needed,
    };
    crate::imgcore::assemble_blocks(&accepted, &grid)
}

/// Refine a natural image into a chosen plain-image by flipping least
/// significant bits of offending blocks until the distinctness condition
/// holds; the visual change stays negligible.
pub fn cpa_refine(
    natural: &PlanarImage,
    profile: &CodecProfile,
    seed: u64,
) -> Result<PlanarImage> {
    if natural.channels() != 3 {
        return Err(Error::invalid("expected a color image"));
    }
    if natural.width() % BLOCK != 0 || natural.height() % BLOCK != 0 {
        return Err(Error::invalid("dimensions must be multiples of the block size"));
    }
    let (mut blocks, grid) = split_blocks(natural, BLOCK, BLOCK)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for _round in 0..64 {
        // Walk blocks in order; each must clear the set built so far.
        let mut seen = HashSet::new();
        let mut offenders = Vec::new();
        for (idx, rgb) in blocks.iter().enumerate() {
            if !try_accept(rgb, profile, &mut seen)? {
                offenders.push(idx);
            }
        }
        if offenders.is_empty() {
            return crate::imgcore::assemble_blocks(&blocks, &grid);
        }
        for idx in offenders {
            // Nudge a handful of least significant bits.
            let data = blocks[idx].data_mut();
            for _ in 0..8 {
                let at = (rng.next_u32() as usize) % data.len();
                data[at] ^= 1;
            }
        }
    }
    Err(Error::Exhausted("LSB refinement did not converge in 64 rounds".into()))
}
