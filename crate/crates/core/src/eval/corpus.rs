//! Deterministic natural-like fixture images: multi-octave smooth noise
//! with edges and fine grain, built directly in luma/chroma form so every
//! flattened channel carries solvable structure. Real image directories can
//! stand in wherever these are used.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::imgcore::{ycbcr_to_rgb, PlanarImage};

fn uniform_f64(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u32() as f64) / (u32::MAX as f64)
}

/// Bilinearly interpolated random lattice, values in [-1, 1].
fn value_noise(rng: &mut ChaCha12Rng, size: usize, cells: usize) -> Vec<f64> {
    let lat = cells + 2;
    let lattice: Vec<f64> = (0..lat * lat).map(|_| uniform_f64(rng) * 2.0 - 1.0).collect();
    let mut out = vec![0.0; size * size];
    let scale = cells as f64 / size as f64;
    for y in 0..size {
        for x in 0..size {
            let fx = x as f64 * scale;
            let fy = y as f64 * scale;
            let (ix, iy) = (fx as usize, fy as usize);
            let (tx, ty) = (fx - ix as f64, fy - iy as f64);
            // Smoothstep keeps lattice seams invisible.
            let (sx, sy) = (tx * tx * (3.0 - 2.0 * tx), ty * ty * (3.0 - 2.0 * ty));
            let v00 = lattice[iy * lat + ix];
            let v10 = lattice[iy * lat + ix + 1];
            let v01 = lattice[(iy + 1) * lat + ix];
            let v11 = lattice[(iy + 1) * lat + ix + 1];
            let top = v00 + (v10 - v00) * sx;
            let bottom = v01 + (v11 - v01) * sx;
            out[y * size + x] = top + (bottom - top) * sy;
        }
    }
    out
}

fn field(rng: &mut ChaCha12Rng, size: usize, octaves: &[(usize, f64)]) -> Vec<f64> {
    let mut acc = vec![0.0; size * size];
    for &(cells, amplitude) in octaves {
        let noise = value_noise(rng, size, cells);
        for (a, n) in acc.iter_mut().zip(noise) {
            *a += n * amplitude;
        }
    }
    acc
}

/// A soft random step edge across the whole frame.
fn soft_edge(rng: &mut ChaCha12Rng, size: usize, amplitude: f64) -> Vec<f64> {
    let angle = uniform_f64(rng) * std::f64::consts::TAU;
    let (nx, ny) = (angle.cos(), angle.sin());
    let offset = (uniform_f64(rng) - 0.5) * size as f64;
    let softness = 1.5 + uniform_f64(rng) * 4.0;
    let mut out = vec![0.0; size * size];
    for y in 0..size {
        for x in 0..size {
            let d = (x as f64 - size as f64 / 2.0) * nx + (y as f64 - size as f64 / 2.0) * ny
                - offset;
            out[y * size + x] = amplitude * (d / softness).tanh();
        }
    }
    out
}

fn one_image(rng: &mut ChaCha12Rng, size: usize) -> PlanarImage {
    let luma_octaves: &[(usize, f64)] = &[(3, 55.0), (6, 30.0), (12, 18.0), (24, 10.0), (48, 6.0)];
    let chroma_octaves: &[(usize, f64)] = &[(3, 32.0), (6, 20.0), (12, 12.0), (24, 6.0)];
    let mut y = field(rng, size, luma_octaves);
    let edge_amplitude = 25.0 + uniform_f64(rng) * 20.0;
    let edge = soft_edge(rng, size, edge_amplitude);
    for (v, e) in y.iter_mut().zip(&edge) {
        *v += e;
    }
    let cb = field(rng, size, chroma_octaves);
    let cr = field(rng, size, chroma_octaves);

    let mut samples = vec![0u8; 3 * size * size];
    for idx in 0..size * size {
        // Fine grain keeps every block distinct and survives mild
        // compression.
        let mut grain = || (uniform_f64(rng) - 0.5) * 8.0;
        let yv = 128.0 + y[idx] * 0.75 + grain();
        let cbv = 128.0 + cb[idx] + grain();
        let crv = 128.0 + cr[idx] + grain();
        samples[idx] = yv.clamp(0.0, 255.0) as u8;
        samples[size * size + idx] = cbv.clamp(0.0, 255.0) as u8;
        samples[2 * size * size + idx] = crv.clamp(0.0, 255.0) as u8;
    }
    let ycbcr = PlanarImage::new(size, size, 3, samples).expect("sized buffer");
    ycbcr_to_rgb(&ycbcr).expect("conversion cannot fail")
}

/// Generate `count` deterministic natural-like RGB images of `size`x`size`.
pub fn gen_corpus(count: usize, size: usize, seed: u64) -> Vec<PlanarImage> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    (0..count).map(|_| one_image(&mut rng, size)).collect()
}
