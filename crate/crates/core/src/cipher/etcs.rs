//! The grayscale-like scheme: color conversion, flattening to one 3W x H
//! plane, 8x8 (configurable) block permutation, per-block rotation/inversion,
//! and negative-positive transformation.

use crate::cipher::keystream::{keystream, Key, KeyStream, Scheme};
use crate::cipher::wmap::{WEntry, WMap};
use crate::error::{Error, Result};
use crate::imgcore::{
    assemble_blocks, dihedral_from_rot_flip, flatten, rgb_to_ycbcr, split_blocks, transform_block,
    unflatten, ycbcr_to_rgb, BlockState, PlanarImage,
};

/// States applied at each cipher position, derived from a keystream.
pub(crate) fn position_states(ks: &KeyStream) -> Vec<BlockState> {
    (0..ks.s.len())
        .map(|p| {
            let (r, f) = ks.rf[p];
            let (cr, ci) = dihedral_from_rot_flip(r, f);
            let mut st = BlockState::new(cr, ci, ks.t[p]);
            if let Some(cperm) = &ks.cperm {
                st = st.with_cperm(cperm[p]);
            }
            st
        })
        .collect()
}

/// The swap-permutation as a table: `arrangement[pos]` is the source block
/// now sitting at `pos` after the sequential swaps.
pub(crate) fn swap_arrangement(s: &[usize]) -> Vec<usize> {
    let mut arrangement: Vec<usize> = (0..s.len()).collect();
    for (i, &target) in s.iter().enumerate() {
        arrangement.swap(i, target);
    }
    arrangement
}

pub(crate) fn encrypt_with_stream(
    img: &PlanarImage,
    ks: &KeyStream,
    block_width: usize,
    block_height: usize,
) -> Result<(PlanarImage, WMap)> {
    let converted = rgb_to_ycbcr(img)?;
    let flat = flatten(&converted)?;
    let (blocks, grid) = split_blocks(&flat, block_width, block_height)?;
    if ks.s.len() != grid.n {
        return Err(Error::invalid("keystream length does not match block count"));
    }
    let arrangement = swap_arrangement(&ks.s);
    let states = position_states(ks);
    let mut cipher_blocks = Vec::with_capacity(grid.n);
    let mut entries = vec![WEntry { position: 0, k: 0, c: 0 }; grid.n];
    for (pos, (&src, &state)) in arrangement.iter().zip(&states).enumerate() {
        cipher_blocks.push(transform_block(&blocks[src], state)?);
        entries[src] = WEntry { position: pos, k: state.variant_index(), c: 0 };
    }
    let cipher = assemble_blocks(&cipher_blocks, &grid)?;
    Ok((cipher, WMap::new(entries, false)))
}

/// Encrypt an RGB image; returns the 3W x H cipher plane and the exact
/// equivalent-key map realised by this keystream.
pub fn etcs_encrypt(
    img: &PlanarImage,
    key: &Key,
    block_width: usize,
    block_height: usize,
) -> Result<(PlanarImage, WMap)> {
    if img.channels() != 3 {
        return Err(Error::invalid("expected a 3-channel plain-image"));
    }
    if img.width() % block_width != 0 || img.height() % block_height != 0 {
        return Err(Error::invalid("image dimensions not divisible by block size"));
    }
    let x = img.width() / block_width;
    let y = img.height() / block_height;
    let n = 3 * x * y;
    let ks = keystream(key, n, Scheme::Etcs);
    encrypt_with_stream(img, &ks, block_width, block_height)
}

/// Permutation-and-rotation-only variant of the scheme (no inversion, no
/// negative-positive step): the baseline the full scheme is measured
/// against. Uses the same keystream with the extra operations masked off.
pub fn etcs_encrypt_rotations(
    img: &PlanarImage,
    key: &Key,
    block_width: usize,
    block_height: usize,
) -> Result<(PlanarImage, WMap)> {
    if img.channels() != 3 {
        return Err(Error::invalid("expected a 3-channel plain-image"));
    }
    if img.width() % block_width != 0 || img.height() % block_height != 0 {
        return Err(Error::invalid("image dimensions not divisible by block size"));
    }
    let n = 3 * (img.width() / block_width) * (img.height() / block_height);
    let mut ks = keystream(key, n, Scheme::Etcs);
    for rf in ks.rf.iter_mut() {
        rf.1 = 0;
    }
    ks.t.iter_mut().for_each(|t| *t = false);
    encrypt_with_stream(img, &ks, block_width, block_height)
}

/// Invert the pipeline. Exact on the lossless path up to the +/-1 color
/// conversion rounding; on decompressed ciphers it simply inverts whatever
/// the channel delivered.
pub fn etcs_decrypt(
    cipher: &PlanarImage,
    key: &Key,
    block_width: usize,
    block_height: usize,
) -> Result<PlanarImage> {
    if cipher.channels() != 1 || cipher.width() % 3 != 0 {
        return Err(Error::invalid("expected a 1-channel cipher plane of width 3W"));
    }
    let (blocks, grid) = split_blocks(cipher, block_width, block_height)?;
    let ks = keystream(key, grid.n, Scheme::Etcs);
    let states = position_states(&ks);
    let mut undone: Vec<_> = blocks
        .iter()
        .zip(&states)
        .map(|(b, st)| transform_block(b, st.inverse()))
        .collect::<Result<_>>()?;
    // Undo the sequential swaps in reverse order.
    for i in (0..grid.n).rev() {
        undone.swap(i, ks.s[i]);
    }
    let flat = assemble_blocks(&undone, &grid)?;
    ycbcr_to_rgb(&unflatten(&flat)?)
}
