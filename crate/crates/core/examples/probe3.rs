//! Scratch driver: per-run voted vs unvoted color correctness.

use etclab::cipher::{etc_encrypt, Key};
use etclab::codec::{jpeg_roundtrip, CodecProfile, Subsampling};
use etclab::compat::{score_all, Metric, PuzzleKind};
use etclab::eval::{neighbor_comparison, Correctness};
use etclab::imgcore::split_blocks;
use etclab::solver::{solve_with_options, SolveOptions};

fn main() {
    let profile = CodecProfile::color(95, Subsampling::S420);
    for run in 0..10u64 {
        let corpus = etclab::eval::gen_corpus(12, 128, 600 + run);
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
        let strict = Correctness::strict(PuzzleKind::Etc);
        let loose = Correctness::standard(PuzzleKind::Etc);
        let voted = solve_with_options(
            &tensor,
            tensor.n(),
            SolveOptions { color_voting: true, ..Default::default() },
        );
        let unvoted = solve_with_options(
            &tensor,
            tensor.n(),
            SolveOptions { color_voting: false, ..Default::default() },
        );
        println!(
            "run {run}: voted strict={:.4} loose={:.4} | unvoted strict={:.4} loose={:.4}",
            neighbor_comparison(&voted, &truth, &grid, 1, strict),
            neighbor_comparison(&voted, &truth, &grid, 1, loose),
            neighbor_comparison(&unvoted, &truth, &grid, 1, strict),
            neighbor_comparison(&unvoted, &truth, &grid, 1, loose),
        );
    }
}
