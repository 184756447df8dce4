//! Pixel-level primitives: color conversion, plane flattening, block
//! partition and reassembly, the intra-block transform group, and the
//! relative-placement encoding.

mod block;
mod image;
mod pngio;
mod transform;

pub use block::{assemble_blocks, split_blocks, Block, BlockGrid};
pub use image::{flatten, rgb_to_ycbcr, unflatten, ycbcr_to_rgb, PlanarImage};
pub use pngio::{read_png, write_png};
pub use transform::{
    compose_cperm, compose_dihedral, dihedral_from_rot_flip, enumerate_variants, invert_cperm,
    opposite_side, transform_block, BlockState, MatchConfig, COLOR_PERMS, SIDE_BOTTOM, SIDE_LEFT,
    SIDE_RIGHT, SIDE_TOP,
};
