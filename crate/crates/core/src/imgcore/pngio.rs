//! Lossless raster I/O for plain-images and intermediate fixtures.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use crate::error::{Error, Result};
use crate::imgcore::image::PlanarImage;

/// Read an 8-bit grayscale or RGB PNG into a planar image.
pub fn read_png(path: &Path) -> Result<PlanarImage> {
    let decoder = png::Decoder::new(BufReader::new(File::open(path)?));
    let mut reader = decoder.read_info().map_err(|e| Error::Format(e.to_string()))?;
    let mut buf = vec![0u8; reader.output_buffer_size().unwrap_or(0)];
    let info = reader.next_frame(&mut buf).map_err(|e| Error::Format(e.to_string()))?;
    buf.truncate(info.buffer_size());
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::invalid("only 8-bit PNGs are supported"));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    match info.color_type {
        png::ColorType::Grayscale => PlanarImage::new(w, h, 1, buf),
        png::ColorType::Rgb => {
            // Interleaved RGB -> planar.
            let mut planar = vec![0u8; 3 * w * h];
            for idx in 0..w * h {
                planar[idx] = buf[3 * idx];
                planar[w * h + idx] = buf[3 * idx + 1];
                planar[2 * w * h + idx] = buf[3 * idx + 2];
            }
            PlanarImage::new(w, h, 3, planar)
        }
        other => Err(Error::invalid(format!("unsupported PNG color type {other:?}"))),
    }
}

/// Write a planar image as an 8-bit grayscale or RGB PNG.
pub fn write_png(img: &PlanarImage, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), img.width() as u32, img.height() as u32);
    encoder.set_depth(png::BitDepth::Eight);
    let data = match img.channels() {
        1 => {
            encoder.set_color(png::ColorType::Grayscale);
            img.samples().to_vec()
        }
        _ => {
            encoder.set_color(png::ColorType::Rgb);
            let len = img.width() * img.height();
            let mut interleaved = vec![0u8; 3 * len];
            for idx in 0..len {
                interleaved[3 * idx] = img.samples()[idx];
                interleaved[3 * idx + 1] = img.samples()[len + idx];
                interleaved[3 * idx + 2] = img.samples()[2 * len + idx];
            }
            interleaved
        }
    };
    let mut writer = encoder.write_header().map_err(|e| Error::Format(e.to_string()))?;
    writer.write_image_data(&data).map_err(|e| Error::Format(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_roundtrip_rgb_and_gray() {
        let dir = tempfile::tempdir().unwrap();
        let rgb = PlanarImage::new(5, 3, 3, (0..45).map(|i| (i * 11) as u8).collect()).unwrap();
        let p = dir.path().join("rgb.png");
        write_png(&rgb, &p).unwrap();
        assert_eq!(read_png(&p).unwrap(), rgb);

        let gray = PlanarImage::new(4, 4, 1, (0..16).map(|i| (i * 16) as u8).collect()).unwrap();
        let p = dir.path().join("gray.png");
        write_png(&gray, &p).unwrap();
        assert_eq!(read_png(&p).unwrap(), gray);
    }
}
