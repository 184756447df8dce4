//! Shared test support: brute-force oracle implementations kept independent
//! of the library's scoring and geometry code, plus small fixture helpers.
//!
//! Everything here is written as plain nested loops over pixels with its own
//! index arithmetic, so agreement with the library is evidence, not
//! tautology.

#![allow(dead_code)]

pub mod oracle {
    use etclab::imgcore::{Block, MatchConfig};

    /// Pixel (x, y) of `b` after rotating it `r` quarter turns clockwise.
    fn rotated(b: &Block, ch: usize, r: u8, x: usize, y: usize) -> u8 {
        let n = b.width();
        match r % 4 {
            0 => b.get(x, y, ch),
            1 => b.get(y, n - 1 - x, ch),
            2 => b.get(n - 1 - x, n - 1 - y, ch),
            _ => b.get(n - 1 - y, x, ch),
        }
    }

    /// Pixel (x, y) of the left block once its side s_u faces right.
    fn left_pixel(a: &Block, ch: usize, s_u: u8, x: usize, y: usize) -> u8 {
        // side 1 needs no turn; side 0 one turn; side 3 two; side 2 three.
        let r = match s_u % 4 {
            1 => 0,
            0 => 1,
            3 => 2,
            _ => 3,
        };
        rotated(a, ch, r, x, y)
    }

    /// Pixel (x, y) of the right block under the configuration: side s_v
    /// faces left, then an upside-down flip for relative inversion, then
    /// negation, then the channel shuffle.
    fn right_pixel(b: &Block, ch: usize, cfg: &MatchConfig, x: usize, y: usize) -> u8 {
        let n = b.width();
        let r = match cfg.s_v % 4 {
            3 => 0,
            2 => 1,
            1 => 2,
            _ => 3,
        };
        let src_ch = etclab::imgcore::COLOR_PERMS[cfg.c as usize][ch];
        let yy = if cfg.i { n - 1 - y } else { y };
        let p = rotated(b, src_ch, r, x, yy);
        if cfg.t {
            255 - p
        } else {
            p
        }
    }

    /// Boundary sum of squared differences, straight from the definition.
    pub fn ssd(a: &Block, b: &Block, cfg: &MatchConfig) -> f64 {
        let n = a.width();
        let mut total = 0.0;
        for ch in 0..a.channels() {
            for y in 0..n {
                let left = left_pixel(a, ch, cfg.s_u, n - 1, y) as f64;
                let right = right_pixel(b, ch, cfg, 0, y) as f64;
                total += (left - right) * (left - right);
            }
        }
        total
    }

    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }

    fn pop_var(v: &[f64]) -> f64 {
        let m = mean(v);
        v.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
    }

    const EPS: f64 = 1e-6;

    /// Symmetrized Mahalanobis gradient compatibility from the definition:
    /// cross-seam steps judged against each side's own boundary gradient
    /// distribution.
    pub fn mgc(a: &Block, b: &Block, cfg: &MatchConfig) -> f64 {
        let n = a.width();
        let mut total = 0.0;
        for ch in 0..a.channels() {
            let al: Vec<f64> =
                (0..n).map(|y| left_pixel(a, ch, cfg.s_u, n - 1, y) as f64).collect();
            let al2: Vec<f64> =
                (0..n).map(|y| left_pixel(a, ch, cfg.s_u, n - 2, y) as f64).collect();
            let br: Vec<f64> = (0..n).map(|y| right_pixel(b, ch, cfg, 0, y) as f64).collect();
            let br2: Vec<f64> = (0..n).map(|y| right_pixel(b, ch, cfg, 1, y) as f64).collect();

            let ga: Vec<f64> = (0..n).map(|i| al[i] - al2[i]).collect();
            let (mu_a, var_a) = (mean(&ga), pop_var(&ga));
            for i in 0..n {
                let d = br[i] - al[i] - mu_a;
                total += d * d / (var_a + EPS);
            }
            let gb: Vec<f64> = (0..n).map(|i| br[i] - br2[i]).collect();
            let (mu_b, var_b) = (mean(&gb), pop_var(&gb));
            for i in 0..n {
                let d = al[i] - br[i] - mu_b;
                total += d * d / (var_b + EPS);
            }
        }
        total
    }

    /// MGC plus the boundary-parallel change terms.
    pub fn emgc(a: &Block, b: &Block, cfg: &MatchConfig) -> f64 {
        let n = a.width();
        let mut total = mgc(a, b, cfg);
        for ch in 0..a.channels() {
            let al: Vec<f64> =
                (0..n).map(|y| left_pixel(a, ch, cfg.s_u, n - 1, y) as f64).collect();
            let al2: Vec<f64> =
                (0..n).map(|y| left_pixel(a, ch, cfg.s_u, n - 2, y) as f64).collect();
            let br: Vec<f64> = (0..n).map(|y| right_pixel(b, ch, cfg, 0, y) as f64).collect();
            let br2: Vec<f64> = (0..n).map(|y| right_pixel(b, ch, cfg, 1, y) as f64).collect();

            let qa: Vec<f64> = (0..n - 1).map(|i| al[i + 1] - al[i]).collect();
            let qa2: Vec<f64> = (0..n - 1).map(|i| al2[i + 1] - al2[i]).collect();
            let qb: Vec<f64> = (0..n - 1).map(|i| br[i + 1] - br[i]).collect();
            let qb2: Vec<f64> = (0..n - 1).map(|i| br2[i + 1] - br2[i]).collect();

            let ha: Vec<f64> = (0..n - 1).map(|i| qa[i] - qa2[i]).collect();
            let (mu_a, var_a) = (mean(&ha), pop_var(&ha));
            for i in 0..n - 1 {
                let d = qb[i] - qa[i] - mu_a;
                total += d * d / (var_a + EPS);
            }
            let hb: Vec<f64> = (0..n - 1).map(|i| qb[i] - qb2[i]).collect();
            let (mu_b, var_b) = (mean(&hb), pop_var(&hb));
            for i in 0..n - 1 {
                let d = qa[i] - qb[i] - mu_b;
                total += d * d / (var_b + EPS);
            }
        }
        total
    }
}

use etclab::imgcore::{Block, PlanarImage};
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

pub fn random_block(rng: &mut ChaCha12Rng, n: usize, channels: usize) -> Block {
    let data = (0..n * n * channels).map(|_| rng.next_u32() as u8).collect();
    Block::new(n, n, channels, data).unwrap()
}

pub fn random_image(rng: &mut ChaCha12Rng, w: usize, h: usize) -> PlanarImage {
    let samples = (0..3 * w * h).map(|_| rng.next_u32() as u8).collect();
    PlanarImage::new(w, h, 3, samples).unwrap()
}
