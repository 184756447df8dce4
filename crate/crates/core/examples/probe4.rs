//! Scratch driver: per-pair channel-order preference quality in one run.

use etclab::cipher::{etc_encrypt, Key};
use etclab::codec::{jpeg_roundtrip, CodecProfile, Subsampling};
use etclab::compat::{score_all, true_adjacencies, Metric, PuzzleKind};
use etclab::imgcore::split_blocks;

fn main() {
    let run: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let profile = CodecProfile::color(95, Subsampling::S420);
    let corpus = etclab::eval::gen_corpus(8, 128, 600 + run);
    let key = Key::new(run + 1, run + 2, run + 3);
    let mut ciphers = Vec::new();
    let mut truth = None;
    for img in &corpus {
        let (c, w) = etc_encrypt(img, &key).unwrap();
        ciphers.push(jpeg_roundtrip(&c, &profile).unwrap());
        truth = Some(w);
    }
    let truth = truth.unwrap();
    let tensor = score_all(&ciphers, Metric::Mgc, PuzzleKind::Etc, 16).unwrap();
    let (_, grid) = split_blocks(&ciphers[0], 16, 16).unwrap();
    let mut good = 0usize;
    let mut total = 0usize;
    let mut geo_good = 0usize;
    for (cfg, _) in true_adjacencies(&truth, &grid, 1) {
        total += 1;
        // Preferred c at the true geometric part.
        let mut best: Option<(f32, u8)> = None;
        for c in 0..6u8 {
            let k = PuzzleKind::Etc.pack(cfg.s_v, cfg.i, cfg.t, c);
            if let Some(w) = tensor.get(cfg.u, cfg.s_u, cfg.v, k) {
                if best.map_or(true, |(bw, _)| w < bw) {
                    best = Some((w, c));
                }
            }
        }
        if best.map(|(_, c)| c) == Some(cfg.c) {
            good += 1;
        }
        // Is the overall argmin the true config at all?
        let (bv, bk) = tensor.row_argmin(cfg.u, cfg.s_u);
        if bv == cfg.v && bk == PuzzleKind::Etc.pack_config(&cfg) {
            geo_good += 1;
        }
    }
    println!(
        "true pairs {total}: preferred-c correct {good} ({:.3}), argmin fully correct {geo_good} ({:.3})",
        good as f64 / total as f64,
        geo_good as f64 / total as f64
    );
}
