//! The 16-element intra-block transform group (4 rotations x horizontal
//! inversion x negative-positive transformation), plus channel permutations
//! for the color scheme and the relative-placement encoding between blocks.
//!
//! Conventions fixed here and used everywhere else:
//! - sides: 0 = top, 1 = right, 2 = bottom, 3 = left;
//! - rotation is in clockwise quarter turns, so one turn maps side s to s+1;
//! - inversion is a horizontal (left-right) mirror applied after rotation;
//! - variant index k = 8*t + 4*i + r.

use crate::error::{Error, Result};
use crate::imgcore::block::Block;

pub const SIDE_TOP: u8 = 0;
pub const SIDE_RIGHT: u8 = 1;
pub const SIDE_BOTTOM: u8 = 2;
pub const SIDE_LEFT: u8 = 3;

/// Where each side ends up under a horizontal mirror: top and bottom stay,
/// left and right swap.
const MIRROR_SIDE: [u8; 4] = [0, 3, 2, 1];

#[inline]
pub fn opposite_side(s: u8) -> u8 {
    (s + 2) % 4
}

/// The six channel orders for the color scheme: RGB, RBG, BGR, BRG, GBR, GRB.
/// `COLOR_PERMS[c][j]` is the source channel feeding output channel j.
pub const COLOR_PERMS: [[usize; 3]; 6] = [
    [0, 1, 2], // RGB
    [0, 2, 1], // RBG
    [2, 1, 0], // BGR
    [2, 0, 1], // BRG
    [1, 2, 0], // GBR
    [1, 0, 2], // GRB
];

/// Index of `a` composed after `b` (apply `b` first, then `a`).
pub fn compose_cperm(a: u8, b: u8) -> u8 {
    let pa = &COLOR_PERMS[a as usize];
    let pb = &COLOR_PERMS[b as usize];
    // out[j] = mid[pa[j]] = in[pb[pa[j]]]
    let composed = [pb[pa[0]], pb[pa[1]], pb[pa[2]]];
    cperm_index(&composed)
}

pub fn invert_cperm(a: u8) -> u8 {
    let p = &COLOR_PERMS[a as usize];
    let mut inv = [0usize; 3];
    for (j, &src) in p.iter().enumerate() {
        inv[src] = j;
    }
    cperm_index(&inv)
}

fn cperm_index(p: &[usize; 3]) -> u8 {
    COLOR_PERMS
        .iter()
        .position(|q| q == p)
        .expect("every 3-permutation is listed") as u8
}

/// Per-block transform state: rotation quarter-turns, horizontal-inversion
/// flag, negative-positive flag, and channel-permutation index (identity for
/// grayscale schemes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockState {
    pub r: u8,
    pub i: bool,
    pub t: bool,
    pub c: u8,
}

impl Default for BlockState {
    fn default() -> Self {
        Self::identity()
    }
}

impl BlockState {
    pub fn identity() -> Self {
        BlockState { r: 0, i: false, t: false, c: 0 }
    }

    pub fn new(r: u8, i: bool, t: bool) -> Self {
        BlockState { r: r % 4, i, t, c: 0 }
    }

    /// Geometric+NPT variant index in [0, 16).
    pub fn variant_index(&self) -> u8 {
        (self.t as u8) * 8 + (self.i as u8) * 4 + self.r
    }

    pub fn from_variant_index(k: u8) -> Self {
        BlockState { r: k % 4, i: (k / 4) % 2 == 1, t: k / 8 == 1, c: 0 }
    }

    pub fn with_cperm(mut self, c: u8) -> Self {
        self.c = c % 6;
        self
    }

    /// The state s' with transform(transform(b, s), s') = b.
    pub fn inverse(&self) -> Self {
        // A mirror-then-rotate is an involution; a pure rotation inverts to
        // the opposite rotation. NPT is an involution, channel perms invert
        // as permutations.
        let r = if self.i { self.r } else { (4 - self.r) % 4 };
        BlockState { r, i: self.i, t: self.t, c: invert_cperm(self.c) }
    }

    /// Direction in which the raw block's side `s` faces once this state is
    /// applied.
    pub fn side_facing(&self, s: u8) -> u8 {
        let rotated = (s + self.r) % 4;
        if self.i {
            MIRROR_SIDE[rotated as usize]
        } else {
            rotated
        }
    }

    /// Inverse of `side_facing`: which raw side faces direction `dir`.
    pub fn raw_side_toward(&self, dir: u8) -> u8 {
        let pre_mirror = if self.i { MIRROR_SIDE[dir as usize] } else { dir };
        (pre_mirror + 4 - self.r) % 4
    }
}

/// Compose two dihedral elements given as (rotation, mirror) pairs in the
/// mirror-after-rotation normal form; `second` is applied after `first`.
pub fn compose_dihedral(second: (u8, bool), first: (u8, bool)) -> (u8, bool) {
    let (r2, i2) = second;
    let (r1, i1) = first;
    let r = if i1 { (r1 + 4 - r2 % 4) % 4 } else { (r1 + r2) % 4 };
    (r, i1 ^ i2)
}

/// Map the cipher's (rotation, inversion-direction) pair onto the canonical
/// (r, i) normal form. Inversion directions: 0 neither, 1 horizontal,
/// 2 vertical, 3 both; applied after the rotation, so (0, 0) is identity.
pub fn dihedral_from_rot_flip(r: u8, f: u8) -> (u8, bool) {
    let flip_part: (u8, bool) = match f % 4 {
        1 => (0, true),  // horizontal mirror
        2 => (2, true),  // vertical mirror = rot180 then horizontal mirror
        3 => (2, false), // both = rot180
        _ => (0, false), // neither
    };
    compose_dihedral(flip_part, (r % 4, false))
}

fn rotate90_plane(src: &[u8], n: usize, dst: &mut [u8]) {
    // Clockwise quarter turn: out[y][x] = in[n-1-x][y].
    for y in 0..n {
        for x in 0..n {
            dst[y * n + x] = src[(n - 1 - x) * n + y];
        }
    }
}

fn mirror_plane(src: &[u8], w: usize, h: usize, dst: &mut [u8]) {
    for y in 0..h {
        for x in 0..w {
            dst[y * w + x] = src[y * w + (w - 1 - x)];
        }
    }
}

/// Apply a block state: rotate, then mirror, then NPT, then channel shuffle.
pub fn transform_block(b: &Block, s: BlockState) -> Result<Block> {
    if s.r % 2 == 1 && b.width() != b.height() {
        return Err(Error::invalid("odd rotation of a non-square block"));
    }
    if s.c != 0 && b.channels() != 3 {
        return Err(Error::invalid("channel permutation needs a 3-channel block"));
    }
    let (w, h) = (b.width(), b.height());
    let plane_len = w * h;
    let mut data = b.data().to_vec();
    let mut scratch = vec![0u8; plane_len];
    for ch in 0..b.channels() {
        let plane = &mut data[ch * plane_len..(ch + 1) * plane_len];
        match s.r % 4 {
            0 => {}
            2 => plane.reverse(),
            quarter => {
                // Square by precondition; one or three clockwise turns.
                for _ in 0..quarter {
                    rotate90_plane(plane, w, &mut scratch);
                    plane.copy_from_slice(&scratch);
                }
            }
        }
        if s.i {
            mirror_plane(plane, w, h, &mut scratch);
            plane.copy_from_slice(&scratch);
        }
        if s.t {
            for p in plane.iter_mut() {
                *p ^= 0xff;
            }
        }
    }
    if s.c != 0 {
        let perm = &COLOR_PERMS[s.c as usize];
        let mut shuffled = vec![0u8; data.len()];
        for j in 0..3 {
            shuffled[j * plane_len..(j + 1) * plane_len]
                .copy_from_slice(&data[perm[j] * plane_len..(perm[j] + 1) * plane_len]);
        }
        data = shuffled;
    }
    Block::new(w, h, b.channels(), data)
}

/// All 16 geometric/NPT images of a block, indexed by k = 8t + 4i + r.
pub fn enumerate_variants(b: &Block) -> Result<Vec<Block>> {
    if b.width() != b.height() {
        return Err(Error::invalid("variants are defined for square blocks"));
    }
    (0..16).map(|k| transform_block(b, BlockState::from_variant_index(k))).collect()
}

/// Encoded relative placement of two blocks: block `v`'s side `s_v` is put
/// against block `u`'s side `s_u`, with relative inversion, NPT, and (for
/// the color scheme) channel-permutation flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchConfig {
    pub u: usize,
    pub v: usize,
    pub s_u: u8,
    pub s_v: u8,
    pub i: bool,
    pub t: bool,
    pub c: u8,
}

impl MatchConfig {
    pub fn new(u: usize, v: usize, s_u: u8, s_v: u8, i: bool, t: bool) -> Self {
        MatchConfig { u, v, s_u: s_u % 4, s_v: s_v % 4, i, t, c: 0 }
    }

    pub fn with_cperm(mut self, c: u8) -> Self {
        self.c = c % 6;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn sample_block(n: usize) -> Block {
        let data: Vec<u8> = (0..n * n).map(|i| (i * 89 + 31) as u8).collect();
        Block::new(n, n, 1, data).unwrap()
    }

    fn color_block(n: usize) -> Block {
        let data: Vec<u8> = (0..3 * n * n).map(|i| (i * 53 + 7) as u8).collect();
        Block::new(n, n, 3, data).unwrap()
    }

    #[test]
    fn identity_state_keeps_block() {
        let b = sample_block(8);
        assert_eq!(transform_block(&b, BlockState::identity()).unwrap(), b);
    }

    #[test]
    fn npt_flips_bits() {
        let b = Block::new(1, 1, 1, vec![100]).unwrap();
        let out = transform_block(&b, BlockState::new(0, false, true)).unwrap();
        assert_eq!(out.data(), &[155]);
    }

    #[test]
    fn npt_is_involution() {
        let b = sample_block(8);
        let s = BlockState::new(0, false, true);
        assert_eq!(transform_block(&transform_block(&b, s).unwrap(), s).unwrap(), b);
    }

    #[test]
    fn generic_block_has_8_dihedral_and_16_total_variants() {
        let b = sample_block(8);
        let variants = enumerate_variants(&b).unwrap();
        let dihedral: HashSet<_> = variants[..8].iter().map(|v| v.data().to_vec()).collect();
        assert_eq!(dihedral.len(), 8);
        let all: HashSet<_> = variants.iter().map(|v| v.data().to_vec()).collect();
        assert_eq!(all.len(), 16);
    }

    #[test]
    fn constant_block_collapses_to_two_variants() {
        let b = Block::new(8, 8, 1, vec![42; 64]).unwrap();
        let variants = enumerate_variants(&b).unwrap();
        let distinct: HashSet<_> = variants.iter().map(|v| v.data().to_vec()).collect();
        assert_eq!(distinct.len(), 2);
    }

    #[test]
    fn variant_zero_is_identity() {
        let b = sample_block(8);
        assert_eq!(enumerate_variants(&b).unwrap()[0], b);
    }

    #[test]
    fn every_variant_has_unique_inverse() {
        let b = sample_block(8);
        for k in 0..16 {
            let s = BlockState::from_variant_index(k);
            let inv = s.inverse();
            let round = transform_block(&transform_block(&b, s).unwrap(), inv).unwrap();
            assert_eq!(round, b, "variant {k} inverse failed");
            // And the inverse is itself one of the 16 variants.
            assert!(inv.variant_index() < 16);
        }
    }

    #[test]
    fn inverse_holds_with_color_perms() {
        let b = color_block(4);
        for k in 0..16 {
            for c in 0..6 {
                let s = BlockState::from_variant_index(k).with_cperm(c);
                let round = transform_block(&transform_block(&b, s).unwrap(), s.inverse()).unwrap();
                assert_eq!(round, b);
            }
        }
    }

    #[test]
    fn dihedral_composition_matches_pixels() {
        let b = sample_block(6);
        for r1 in 0..4u8 {
            for i1 in [false, true] {
                for r2 in 0..4u8 {
                    for i2 in [false, true] {
                        let first = BlockState::new(r1, i1, false);
                        let second = BlockState::new(r2, i2, false);
                        let (r, i) = compose_dihedral((r2, i2), (r1, i1));
                        let composed = BlockState::new(r, i, false);
                        let two_step =
                            transform_block(&transform_block(&b, first).unwrap(), second).unwrap();
                        let one_step = transform_block(&b, composed).unwrap();
                        assert_eq!(two_step, one_step, "compose ({r2},{i2})o({r1},{i1})");
                    }
                }
            }
        }
    }

    #[test]
    fn rot_flip_pairs_cover_exactly_8_elements() {
        let b = sample_block(8);
        let mut images = HashSet::new();
        for r in 0..4u8 {
            for f in 0..4u8 {
                let (cr, ci) = dihedral_from_rot_flip(r, f);
                let out = transform_block(&b, BlockState::new(cr, ci, false)).unwrap();
                images.insert(out.data().to_vec());
            }
        }
        assert_eq!(images.len(), 8);
    }

    #[test]
    fn rot_flip_mapping_matches_direct_flips() {
        // f applied after rotation: none, horizontal mirror, vertical
        // mirror, both (rot180). Verify against hand-built pixel ops.
        let b = sample_block(4);
        let n = 4usize;
        let flip_h = |src: &Block| {
            let mut d = vec![0u8; n * n];
            for y in 0..n {
                for x in 0..n {
                    d[y * n + x] = src.data()[y * n + (n - 1 - x)];
                }
            }
            Block::new(n, n, 1, d).unwrap()
        };
        let flip_v = |src: &Block| {
            let mut d = vec![0u8; n * n];
            for y in 0..n {
                for x in 0..n {
                    d[y * n + x] = src.data()[(n - 1 - y) * n + x];
                }
            }
            Block::new(n, n, 1, d).unwrap()
        };
        for r in 0..4u8 {
            let rotated = transform_block(&b, BlockState::new(r, false, false)).unwrap();
            let expect = [
                rotated.clone(),
                flip_h(&rotated),
                flip_v(&rotated),
                flip_v(&flip_h(&rotated)),
            ];
            for f in 0..4u8 {
                let (cr, ci) = dihedral_from_rot_flip(r, f);
                let got = transform_block(&b, BlockState::new(cr, ci, false)).unwrap();
                assert_eq!(got, expect[f as usize], "r={r} f={f}");
            }
        }
    }

    #[test]
    fn side_facing_matches_pixel_motion() {
        // Mark one side of a block, transform, and find where the mark went.
        let n = 4usize;
        for s in 0..4u8 {
            let mut data = vec![0u8; n * n];
            match s {
                0 => data[..n].fill(255),
                1 => (0..n).for_each(|y| data[y * n + n - 1] = 255),
                2 => data[(n - 1) * n..].fill(255),
                _ => (0..n).for_each(|y| data[y * n] = 255),
            }
            let b = Block::new(n, n, 1, data).unwrap();
            for k in 0..8u8 {
                let st = BlockState::from_variant_index(k);
                let out = transform_block(&b, st).unwrap();
                let marked_side = (0..4u8)
                    .find(|&side| {
                        let sum: u32 = match side {
                            0 => out.data()[..n].iter().map(|&p| p as u32).sum(),
                            1 => (0..n).map(|y| out.data()[y * n + n - 1] as u32).sum(),
                            2 => out.data()[(n - 1) * n..].iter().map(|&p| p as u32).sum(),
                            _ => (0..n).map(|y| out.data()[y * n] as u32).sum(),
                        };
                        sum == 255 * n as u32
                    })
                    .unwrap();
                assert_eq!(st.side_facing(s), marked_side, "side {s} variant {k}");
                assert_eq!(st.raw_side_toward(marked_side), s);
            }
        }
    }

    #[test]
    fn cperm_compose_and_invert() {
        for a in 0..6u8 {
            assert_eq!(compose_cperm(a, invert_cperm(a)), 0);
            assert_eq!(compose_cperm(invert_cperm(a), a), 0);
            for b in 0..6u8 {
                // Composition agrees with applying the permutations to a block.
                let blk = color_block(2);
                let one = transform_block(
                    &transform_block(&blk, BlockState::identity().with_cperm(b)).unwrap(),
                    BlockState::identity().with_cperm(a),
                )
                .unwrap();
                let two =
                    transform_block(&blk, BlockState::identity().with_cperm(compose_cperm(a, b)))
                        .unwrap();
                assert_eq!(one, two);
            }
        }
    }

    #[test]
    fn odd_rotation_of_non_square_rejected() {
        let b = Block::new(4, 2, 1, vec![0; 8]).unwrap();
        assert!(transform_block(&b, BlockState::new(1, false, false)).is_err());
        assert!(transform_block(&b, BlockState::new(2, false, false)).is_ok());
    }
}
