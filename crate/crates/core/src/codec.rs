//! The lossy channel: baseline JPEG round-trips at a configurable quality
//! factor and chroma subsampling, plus a simulated photo-sharing pipeline
//! (decode, optional smoothing, re-encode).
//!
//! The JPEG codec itself is an external dependency behind this module's
//! contract; one build is pinned and identified by [`CODEC_ID`] because
//! bit-exactness across codec builds is not promised.

use jpeg_encoder::{ColorType, Encoder, SamplingFactor};
use zune_jpeg::zune_core::bytestream::ZCursor;
use zune_jpeg::zune_core::colorspace::ColorSpace;
use zune_jpeg::zune_core::options::DecoderOptions;
use zune_jpeg::JpegDecoder;

use crate::error::{Error, Result};
use crate::imgcore::PlanarImage;

/// Identifier of the pinned codec build, recorded in all reports.
pub const CODEC_ID: &str = "jpeg-encoder-0.7+zune-jpeg-0.5";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsampling {
    /// No chroma subsampling.
    S444,
    /// 2x2 chroma subsampling.
    S420,
    /// 2x1 horizontal chroma subsampling.
    S422,
}

impl Subsampling {
    fn factor(self) -> SamplingFactor {
        match self {
            Subsampling::S444 => SamplingFactor::F_1_1,
            Subsampling::S420 => SamplingFactor::F_2_2,
            Subsampling::S422 => SamplingFactor::F_2_1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Subsampling::S444 => "4:4:4",
            Subsampling::S420 => "4:2:0",
            Subsampling::S422 => "4:2:2",
        }
    }
}

/// Encoding parameters for one trip through the channel. Grayscale images
/// ignore the subsampling setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecProfile {
    pub quality: u8,
    pub subsampling: Subsampling,
    pub grayscale: bool,
}

impl CodecProfile {
    pub fn gray(quality: u8) -> Self {
        CodecProfile { quality, subsampling: Subsampling::S444, grayscale: true }
    }

    pub fn color(quality: u8, subsampling: Subsampling) -> Self {
        CodecProfile { quality, subsampling, grayscale: false }
    }

    fn validate(&self, img: &PlanarImage) -> Result<()> {
        if self.quality < 1 || self.quality > 100 {
            return Err(Error::invalid(format!("quality {} outside [1,100]", self.quality)));
        }
        if self.grayscale != (img.channels() == 1) {
            return Err(Error::invalid("profile grayscale flag does not match image channels"));
        }
        if img.width() > u16::MAX as usize || img.height() > u16::MAX as usize {
            return Err(Error::invalid("image too large for baseline JPEG"));
        }
        Ok(())
    }
}

/// Simulated photo-sharing pipeline applied to an already-compressed image:
/// re-compression at `quality` with an optional box smoothing pass first.
/// Uploads are assumed size-restricted, so there is never a resize step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OsnProfile {
    pub quality: u8,
    /// Box kernel width in pixels; 0 or 1 disables smoothing.
    pub smoothing: usize,
}

impl OsnProfile {
    pub fn label(&self) -> String {
        format!("osn(q={},smooth={},resize=none)", self.quality, self.smoothing)
    }
}

/// Encode to baseline JPEG bytes.
pub fn jpeg_encode(img: &PlanarImage, profile: &CodecProfile) -> Result<Vec<u8>> {
    profile.validate(img)?;
    let mut out = Vec::new();
    let mut encoder = Encoder::new(&mut out, profile.quality);
    encoder.set_sampling_factor(profile.subsampling.factor());
    let (w, h) = (img.width() as u16, img.height() as u16);
    let result = if img.channels() == 1 {
        encoder.encode(img.samples(), w, h, ColorType::Luma)
    } else {
        encoder.encode(&interleave(img), w, h, ColorType::Rgb)
    };
    result.map_err(|e| Error::Codec(e.to_string()))?;
    Ok(out)
}

/// Decode baseline JPEG bytes to a planar image (grayscale or RGB).
pub fn jpeg_decode(bytes: &[u8]) -> Result<PlanarImage> {
    // Probe the headers so grayscale sources come back as one plane instead
    // of the decoder's default RGB expansion.
    let mut header = JpegDecoder::new(ZCursor::new(bytes));
    header.decode_headers().map_err(|e| Error::Codec(e.to_string()))?;
    let target = match header.input_colorspace() {
        Some(ColorSpace::Luma) => ColorSpace::Luma,
        Some(_) => ColorSpace::RGB,
        None => return Err(Error::Codec("missing JPEG input colorspace".into())),
    };
    let options = DecoderOptions::default().jpeg_set_out_colorspace(target);
    let mut decoder = JpegDecoder::new_with_options(ZCursor::new(bytes), options);
    let pixels = decoder.decode().map_err(|e| Error::Codec(e.to_string()))?;
    let info = decoder.info().ok_or_else(|| Error::Codec("missing JPEG header info".into()))?;
    let (w, h) = (info.width as usize, info.height as usize);
    match decoder.output_colorspace() {
        Some(ColorSpace::Luma) => PlanarImage::new(w, h, 1, pixels),
        Some(ColorSpace::RGB) => {
            let mut planar = vec![0u8; 3 * w * h];
            for idx in 0..w * h {
                planar[idx] = pixels[3 * idx];
                planar[w * h + idx] = pixels[3 * idx + 1];
                planar[2 * w * h + idx] = pixels[3 * idx + 2];
            }
            PlanarImage::new(w, h, 3, planar)
        }
        other => Err(Error::Codec(format!("unsupported decode colorspace {other:?}"))),
    }
}

/// One encode/decode generation through the channel. Deterministic for a
/// fixed profile and codec build; dimensions are preserved.
pub fn jpeg_roundtrip(img: &PlanarImage, profile: &CodecProfile) -> Result<PlanarImage> {
    let bytes = jpeg_encode(img, profile)?;
    let out = jpeg_decode(&bytes)?;
    if out.width() != img.width() || out.height() != img.height() {
        return Err(Error::Codec("channel changed image dimensions".into()));
    }
    Ok(out)
}

/// The sharing-platform channel: decode happened upstream, so this applies
/// optional smoothing and one re-encode generation at the profile quality.
pub fn osn_channel(img: &PlanarImage, profile: &OsnProfile) -> Result<PlanarImage> {
    let smoothed;
    let source = if profile.smoothing >= 2 {
        smoothed = box_blur(img, profile.smoothing);
        &smoothed
    } else {
        img
    };
    let codec = CodecProfile {
        quality: profile.quality,
        subsampling: Subsampling::S420,
        grayscale: img.channels() == 1,
    };
    jpeg_roundtrip(source, &codec)
}

fn interleave(img: &PlanarImage) -> Vec<u8> {
    let len = img.width() * img.height();
    let mut out = vec![0u8; 3 * len];
    let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
    for idx in 0..len {
        out[3 * idx] = r[idx];
        out[3 * idx + 1] = g[idx];
        out[3 * idx + 2] = b[idx];
    }
    out
}

/// Box smoothing with clamp-to-edge handling, rounded to nearest.
pub fn box_blur(img: &PlanarImage, kernel: usize) -> PlanarImage {
    if kernel < 2 {
        return img.clone();
    }
    let (w, h) = (img.width(), img.height());
    let half = (kernel / 2) as isize;
    let lo = -half + if kernel % 2 == 0 { 1 } else { 0 };
    let mut out = img.clone();
    for ch in 0..img.channels() {
        let src = img.plane(ch).to_vec();
        for y in 0..h as isize {
            for x in 0..w as isize {
                let mut sum = 0u32;
                for dy in lo..=half {
                    for dx in lo..=half {
                        let sx = (x + dx).clamp(0, w as isize - 1) as usize;
                        let sy = (y + dy).clamp(0, h as isize - 1) as usize;
                        sum += src[sy * w + sx] as u32;
                    }
                }
                let count = (half - lo + 1) as u32;
                let avg = (sum + count * count / 2) / (count * count);
                out.set(x as usize, y as usize, ch, avg.min(255) as u8);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured_gray(w: usize, h: usize) -> PlanarImage {
        // Smooth ramp with deterministic texture; enough detail that the
        // channel is visibly lossy at low quality.
        let mut samples = vec![0u8; w * h];
        for y in 0..h {
            for x in 0..w {
                let base = (x * 192 / w + y * 40 / h) as i32;
                let tex = (((x * 13 + y * 7) % 17) as i32) - 8;
                samples[y * w + x] = (base + tex).clamp(0, 255) as u8;
            }
        }
        PlanarImage::new(w, h, 1, samples).unwrap()
    }

    fn mae(a: &PlanarImage, b: &PlanarImage) -> f64 {
        let total: u64 = a
            .samples()
            .iter()
            .zip(b.samples())
            .map(|(&x, &y)| (x as i64 - y as i64).unsigned_abs())
            .sum();
        total as f64 / a.samples().len() as f64
    }

    #[test]
    fn constant_image_survives_q100() {
        let img = PlanarImage::new(32, 16, 1, vec![137; 32 * 16]).unwrap();
        let out = jpeg_roundtrip(&img, &CodecProfile::gray(100)).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn quality_orders_roundtrip_error() {
        let img = textured_gray(64, 64);
        let hi = jpeg_roundtrip(&img, &CodecProfile::gray(95)).unwrap();
        let lo = jpeg_roundtrip(&img, &CodecProfile::gray(47)).unwrap();
        assert!(mae(&img, &hi) < mae(&img, &lo), "q95 should beat q47");
    }

    #[test]
    fn dimensions_preserved_across_subsampling() {
        for sub in [Subsampling::S444, Subsampling::S420, Subsampling::S422] {
            let img = PlanarImage::new(48, 32, 3, vec![90; 3 * 48 * 32]).unwrap();
            let out = jpeg_roundtrip(&img, &CodecProfile::color(80, sub)).unwrap();
            assert_eq!((out.width(), out.height(), out.channels()), (48, 32, 3));
        }
    }

    #[test]
    fn regeneration_differences_shrink() {
        let img = textured_gray(64, 64);
        let profile = CodecProfile::gray(75);
        let g1 = jpeg_roundtrip(&img, &profile).unwrap();
        let g2 = jpeg_roundtrip(&g1, &profile).unwrap();
        let g3 = jpeg_roundtrip(&g2, &profile).unwrap();
        let diff = |a: &PlanarImage, b: &PlanarImage| {
            a.samples().iter().zip(b.samples()).filter(|(x, y)| x != y).count()
        };
        assert!(diff(&g2, &g3) <= diff(&g1, &g2));
    }

    #[test]
    fn blockwise_roundtrip_matches_full_image() {
        // Baseline JPEG quantizes each aligned 8x8 block independently (the
        // differential DC coding is lossless), so compressing a block alone
        // must equal its result inside the full image. The exact plaintext
        // attack relies on this.
        use crate::imgcore::split_blocks;
        let img = textured_gray(64, 24);
        for q in [47, 80, 100] {
            let profile = CodecProfile::gray(q);
            let full = jpeg_roundtrip(&img, &profile).unwrap();
            let (blocks, grid) = split_blocks(&img, 8, 8).unwrap();
            let (full_blocks, _) = split_blocks(&full, 8, 8).unwrap();
            for (i, b) in blocks.iter().enumerate() {
                let alone = PlanarImage::new(8, 8, 1, b.data().to_vec()).unwrap();
                let rt = jpeg_roundtrip(&alone, &profile).unwrap();
                assert_eq!(
                    rt.samples(),
                    full_blocks[i].data(),
                    "block {i} of {} differs at q={q}",
                    grid.n
                );
            }
        }
    }

    #[test]
    fn osn_identity_settings_is_one_reencode() {
        let img = textured_gray(32, 32);
        let first = jpeg_roundtrip(&img, &CodecProfile::gray(90)).unwrap();
        let osn = osn_channel(&first, &OsnProfile { quality: 100, smoothing: 0 }).unwrap();
        let reencode = jpeg_roundtrip(&first, &CodecProfile::gray(100)).unwrap();
        assert_eq!(osn, reencode);
    }

    #[test]
    fn box_blur_averages_neighbourhood() {
        let mut img = PlanarImage::zeroed(3, 3, 1).unwrap();
        img.set(1, 1, 0, 90);
        let out = box_blur(&img, 3);
        assert_eq!(out.get(1, 1, 0), 10);
        // Corner kernel clamps to edge: centre pixel counted once.
        assert_eq!(out.get(0, 0, 0), 10);
    }

    #[test]
    fn profile_validation() {
        let gray = PlanarImage::zeroed(8, 8, 1).unwrap();
        assert!(jpeg_encode(&gray, &CodecProfile::color(80, Subsampling::S444)).is_err());
        assert!(jpeg_encode(&gray, &CodecProfile { quality: 0, ..CodecProfile::gray(1) }).is_err());
    }
}
