use crate::error::{Error, Result};

/// 8-bit raster with 1 or 3 channels, stored channel-planar in raster order.
///
/// This is the unit every pipeline in the crate consumes and produces:
/// plain-images are 3-channel RGB, flattened/cipher planes are 1-channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarImage {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<u8>,
}

impl PlanarImage {
    pub fn new(width: usize, height: usize, channels: usize, samples: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::invalid(format!("channels must be 1 or 3, got {channels}")));
        }
        if width == 0 || height == 0 {
            return Err(Error::invalid("zero-sized image"));
        }
        if samples.len() != width * height * channels {
            return Err(Error::invalid(format!(
                "sample count {} != {}x{}x{}",
                samples.len(),
                width,
                height,
                channels
            )));
        }
        Ok(Self { width, height, channels, samples })
    }

    pub fn zeroed(width: usize, height: usize, channels: usize) -> Result<Self> {
        Self::new(width, height, channels, vec![0; width * height * channels])
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

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [u8] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    /// One channel's plane as a contiguous slice.
    pub fn plane(&self, channel: usize) -> &[u8] {
        let len = self.width * self.height;
        &self.samples[channel * len..(channel + 1) * len]
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, channel: usize) -> u8 {
        self.samples[channel * self.width * self.height + y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, channel: usize, value: u8) {
        self.samples[channel * self.width * self.height + y * self.width + x] = value;
    }
}

// Forward color conversion coefficients (RGB -> YCbCr), rows in Y, Cb, Cr order.
const FWD: [[f64; 3]; 3] = [
    [0.299, 0.587, 0.114],
    [-0.1687, -0.3313, 0.5],
    [0.5, -0.4187, -0.0813],
];
const FWD_OFFSET: [f64; 3] = [0.0, 128.0, 128.0];

/// Inverse of the 3x3 forward matrix, computed from `FWD` so the two
/// directions can never drift apart.
fn inverse_matrix() -> [[f64; 3]; 3] {
    let m = &FWD;
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut inv = [[0.0; 3]; 3];
    inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
    inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
    inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
    inv
}

#[inline]
fn round_clamp(v: f64) -> u8 {
    // Round half away from zero; identical to round-half-up after the
    // [0, 255] clamp on this value range.
    v.round().clamp(0.0, 255.0) as u8
}

/// Convert an RGB image to YCbCr, rounding to nearest and clamping to [0, 255].
pub fn rgb_to_ycbcr(img: &PlanarImage) -> Result<PlanarImage> {
    if img.channels() != 3 {
        return Err(Error::invalid("rgb_to_ycbcr requires a 3-channel image"));
    }
    let len = img.width() * img.height();
    let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
    let mut out = vec![0u8; 3 * len];
    let (y_out, rest) = out.split_at_mut(len);
    let (cb_out, cr_out) = rest.split_at_mut(len);
    for idx in 0..len {
        let rv = r[idx] as f64;
        let gv = g[idx] as f64;
        let bv = b[idx] as f64;
        y_out[idx] = round_clamp(FWD[0][0] * rv + FWD[0][1] * gv + FWD[0][2] * bv + FWD_OFFSET[0]);
        cb_out[idx] = round_clamp(FWD[1][0] * rv + FWD[1][1] * gv + FWD[1][2] * bv + FWD_OFFSET[1]);
        cr_out[idx] = round_clamp(FWD[2][0] * rv + FWD[2][1] * gv + FWD[2][2] * bv + FWD_OFFSET[2]);
    }
    PlanarImage::new(img.width(), img.height(), 3, out)
}

/// Inverse color conversion; composed with `rgb_to_ycbcr` it is identity up
/// to +/-1 per sample from rounding.
pub fn ycbcr_to_rgb(img: &PlanarImage) -> Result<PlanarImage> {
    if img.channels() != 3 {
        return Err(Error::invalid("ycbcr_to_rgb requires a 3-channel image"));
    }
    let inv = inverse_matrix();
    let len = img.width() * img.height();
    let (y, cb, cr) = (img.plane(0), img.plane(1), img.plane(2));
    let mut out = vec![0u8; 3 * len];
    let (r_out, rest) = out.split_at_mut(len);
    let (g_out, b_out) = rest.split_at_mut(len);
    for idx in 0..len {
        let yv = y[idx] as f64 - FWD_OFFSET[0];
        let cbv = cb[idx] as f64 - FWD_OFFSET[1];
        let crv = cr[idx] as f64 - FWD_OFFSET[2];
        r_out[idx] = round_clamp(inv[0][0] * yv + inv[0][1] * cbv + inv[0][2] * crv);
        g_out[idx] = round_clamp(inv[1][0] * yv + inv[1][1] * cbv + inv[1][2] * crv);
        b_out[idx] = round_clamp(inv[2][0] * yv + inv[2][1] * cbv + inv[2][2] * crv);
    }
    PlanarImage::new(img.width(), img.height(), 3, out)
}

/// Place the three channels side by side into one 3W x H plane: output
/// column `i + k*W` holds channel `k`'s column `i`.
pub fn flatten(img: &PlanarImage) -> Result<PlanarImage> {
    if img.channels() != 3 {
        return Err(Error::invalid("flatten requires a 3-channel image"));
    }
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0u8; 3 * w * h];
    for k in 0..3 {
        let plane = img.plane(k);
        for y in 0..h {
            let src = &plane[y * w..(y + 1) * w];
            let dst = &mut out[y * 3 * w + k * w..y * 3 * w + (k + 1) * w];
            dst.copy_from_slice(src);
        }
    }
    PlanarImage::new(3 * w, h, 1, out)
}

/// Exact inverse of `flatten`.
pub fn unflatten(img: &PlanarImage) -> Result<PlanarImage> {
    if img.channels() != 1 || img.width() % 3 != 0 {
        return Err(Error::invalid("unflatten requires a 1-channel image of width 3W"));
    }
    let w = img.width() / 3;
    let h = img.height();
    let mut out = vec![0u8; 3 * w * h];
    let src = img.samples();
    for k in 0..3 {
        for y in 0..h {
            let row = &src[y * 3 * w + k * w..y * 3 * w + (k + 1) * w];
            out[k * w * h + y * w..k * w * h + (y + 1) * w].copy_from_slice(row);
        }
    }
    PlanarImage::new(w, h, 3, out)
}
