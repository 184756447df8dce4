use crate::error::{Error, Result};
use crate::imgcore::image::PlanarImage;

/// One tile of an image; 1 channel for flattened-plane puzzles, 3 for the
/// color scheme. Data is channel-planar like `PlanarImage`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl Block {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height * channels {
            return Err(Error::invalid("block data length mismatch"));
        }
        Ok(Self { width, height, channels, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn plane(&self, channel: usize) -> &[u8] {
        let len = self.width * self.height;
        &self.data[channel * len..(channel + 1) * len]
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, channel: usize) -> u8 {
        self.data[channel * self.width * self.height + y * self.width + x]
    }
}

/// Raster-ordered partition of an image into equally sized tiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockGrid {
    pub block_width: usize,
    pub block_height: usize,
    /// Blocks per row.
    pub x: usize,
    /// Blocks per column.
    pub y: usize,
    /// Total block count.
    pub n: usize,
}

impl BlockGrid {
    pub fn cell_of(&self, index: usize) -> (usize, usize) {
        (index % self.x, index / self.x)
    }

    pub fn index_of(&self, cx: usize, cy: usize) -> usize {
        cy * self.x + cx
    }
}

/// Split an image into raster-ordered tiles. Dimensions that are not exact
/// multiples of the block size are rejected rather than cropped, keeping
/// evaluation denominators exact.
pub fn split_blocks(
    img: &PlanarImage,
    block_width: usize,
    block_height: usize,
) -> Result<(Vec<Block>, BlockGrid)> {
    if block_width < 2 || block_height < 2 {
        return Err(Error::invalid("block size must be at least 2"));
    }
    if img.width() % block_width != 0 || img.height() % block_height != 0 {
        return Err(Error::invalid(format!(
            "image {}x{} not divisible by block {}x{}",
            img.width(),
            img.height(),
            block_width,
            block_height
        )));
    }
    let x = img.width() / block_width;
    let y = img.height() / block_height;
    let grid = BlockGrid { block_width, block_height, x, y, n: x * y };
    let mut blocks = Vec::with_capacity(grid.n);
    for cy in 0..y {
        for cx in 0..x {
            let mut data = Vec::with_capacity(block_width * block_height * img.channels());
            for ch in 0..img.channels() {
                let plane = img.plane(ch);
                for row in 0..block_height {
                    let src_y = cy * block_height + row;
                    let start = src_y * img.width() + cx * block_width;
                    data.extend_from_slice(&plane[start..start + block_width]);
                }
            }
            blocks.push(Block::new(block_width, block_height, img.channels(), data)?);
        }
    }
    Ok((blocks, grid))
}

/// Exact inverse of `split_blocks` for a full set of conforming tiles.
pub fn assemble_blocks(blocks: &[Block], grid: &BlockGrid) -> Result<PlanarImage> {
    if blocks.len() != grid.n {
        return Err(Error::invalid("block count does not match grid"));
    }
    let channels = blocks.first().map(|b| b.channels()).unwrap_or(1);
    let width = grid.x * grid.block_width;
    let height = grid.y * grid.block_height;
    let mut img = PlanarImage::zeroed(width, height, channels)?;
    for (idx, block) in blocks.iter().enumerate() {
        if block.width() != grid.block_width
            || block.height() != grid.block_height
            || block.channels() != channels
        {
            return Err(Error::invalid("block shape does not match grid"));
        }
        let (cx, cy) = grid.cell_of(idx);
        for ch in 0..channels {
            let plane = block.plane(ch);
            for row in 0..grid.block_height {
                let dst_y = cy * grid.block_height + row;
                let dst_start = ch * width * height + dst_y * width + cx * grid.block_width;
                img.samples_mut()[dst_start..dst_start + grid.block_width]
                    .copy_from_slice(&plane[row * grid.block_width..(row + 1) * grid.block_width]);
            }
        }
    }
    Ok(img)
}
