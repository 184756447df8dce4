//! The conventional color scheme: 16x16 RGB blocks permuted and transformed
//! directly in RGB space, with the three color components of every block
//! shuffled into one of six orders.

use crate::cipher::etcs::{position_states, swap_arrangement};
use crate::cipher::keystream::{keystream, Key, KeyStream, Scheme};
use crate::cipher::wmap::{WEntry, WMap};
use crate::error::{Error, Result};
use crate::imgcore::{assemble_blocks, split_blocks, transform_block, PlanarImage};

/// Block size is fixed: chroma subsampling in the channel works on 8x8
/// tiles of the half-resolution planes, so encryption tiles smaller than
/// 16x16 would destroy the compression ratio.
pub const ETC_BLOCK: usize = 16;

pub(crate) fn encrypt_with_stream(img: &PlanarImage, ks: &KeyStream) -> Result<(PlanarImage, WMap)> {
    let (blocks, grid) = split_blocks(img, ETC_BLOCK, ETC_BLOCK)?;
    if ks.s.len() != grid.n {
        return Err(Error::invalid("keystream length does not match block count"));
    }
    let arrangement = swap_arrangement(&ks.s);
    let states = position_states(ks);
    let mut cipher_blocks = Vec::with_capacity(grid.n);
    let mut entries = vec![WEntry { position: 0, k: 0, c: 0 }; grid.n];
    for (pos, (&src, &state)) in arrangement.iter().zip(&states).enumerate() {
        cipher_blocks.push(transform_block(&blocks[src], state)?);
        entries[src] = WEntry { position: pos, k: state.variant_index(), c: state.c };
    }
    let cipher = assemble_blocks(&cipher_blocks, &grid)?;
    Ok((cipher, WMap::new(entries, true)))
}

/// Encrypt an RGB image in place of its color planes; the cipher-image stays
/// a WxH color image.
pub fn etc_encrypt(img: &PlanarImage, key: &Key) -> Result<(PlanarImage, WMap)> {
    if img.channels() != 3 {
        return Err(Error::invalid("expected a 3-channel plain-image"));
    }
    if img.width() % ETC_BLOCK != 0 || img.height() % ETC_BLOCK != 0 {
        return Err(Error::invalid("image dimensions not divisible by 16"));
    }
    let n = (img.width() / ETC_BLOCK) * (img.height() / ETC_BLOCK);
    let ks = keystream(key, n, Scheme::Etc);
    encrypt_with_stream(img, &ks)
}

/// Invert the pipeline after the channel has fully decompressed the image.
/// On a subsampled channel the chroma interpolation has already mixed
/// unrelated blocks, so boundary distortion in the output is expected and
/// deliberately not corrected.
pub fn etc_decrypt(cipher: &PlanarImage, key: &Key) -> Result<PlanarImage> {
    if cipher.channels() != 3 {
        return Err(Error::invalid("expected a 3-channel cipher-image"));
    }
    let (blocks, grid) = split_blocks(cipher, ETC_BLOCK, ETC_BLOCK)?;
    let ks = keystream(key, grid.n, Scheme::Etc);
    let states = position_states(&ks);
    let mut undone: Vec<_> = blocks
        .iter()
        .zip(&states)
        .map(|(b, st)| transform_block(b, st.inverse()))
        .collect::<Result<_>>()?;
    for i in (0..grid.n).rev() {
        undone.swap(i, ks.s[i]);
    }
    assemble_blocks(&undone, &grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha12Rng;
    use rand_core::{RngCore, SeedableRng};

    fn random_image(w: usize, h: usize, seed: u64) -> PlanarImage {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let samples = (0..3 * w * h).map(|_| rng.next_u32() as u8).collect();
        PlanarImage::new(w, h, 3, samples).unwrap()
    }

    #[test]
    fn block_count_for_256() {
        let img = random_image(256, 256, 1);
        let (cipher, map) = etc_encrypt(&img, &Key::new(4, 5, 6)).unwrap();
        assert_eq!(map.len(), 256);
        assert_eq!((cipher.width(), cipher.height(), cipher.channels()), (256, 256, 3));
        assert!(map.is_permutation());
    }

    #[test]
    fn identity_keystream_is_plaintext() {
        let img = random_image(32, 32, 2);
        let ks = KeyStream {
            s: (0..4).collect(),
            rf: vec![(0, 0); 4],
            t: vec![false; 4],
            cperm: Some(vec![0; 4]),
        };
        let (cipher, _) = encrypt_with_stream(&img, &ks).unwrap();
        assert_eq!(cipher, img);
    }

    #[test]
    fn lossless_roundtrip_is_exact() {
        let img = random_image(64, 48, 3);
        let key = Key::new(21, 32, 43);
        let (cipher, _) = etc_encrypt(&img, &key).unwrap();
        assert_eq!(etc_decrypt(&cipher, &key).unwrap(), img);
    }

    #[test]
    fn wmap_records_channel_shuffle() {
        let img = random_image(64, 64, 4);
        let (_, map) = etc_encrypt(&img, &Key::new(7, 7, 7)).unwrap();
        assert!(map.has_color);
        assert!(map.entries().iter().any(|e| e.c != 0));
    }

    #[test]
    fn divisibility_by_16_enforced() {
        let img = random_image(40, 40, 5);
        assert!(etc_encrypt(&img, &Key::new(1, 1, 1)).is_err());
    }
}
