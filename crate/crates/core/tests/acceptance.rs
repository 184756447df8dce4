//! The acceptance suite: every release gate as one test with a printed
//! verdict line. Run with `--nocapture` (and `--test-threads=1` for tidy
//! output) to see the per-criterion lines.

mod common;

use std::time::Instant;

use etclab::attacks::{
    cpa_construct, kpa_candidates, kpa_exact, kpa_probability, variants_distinct, w_accuracy,
};
use etclab::cipher::{etc_encrypt, etcs_decrypt, etcs_encrypt, Key};
use etclab::codec::{jpeg_roundtrip, osn_channel, CodecProfile, OsnProfile, Subsampling};
use etclab::compat::{metric_accuracy, score_all, Metric, PuzzleKind, ScoreTensor};
use etclab::eval::{gen_corpus, largest_component, neighbor_comparison, Correctness};
use etclab::imgcore::{split_blocks, transform_block, Block, BlockState, MatchConfig, PlanarImage};
use etclab::solver::{solve, solve_with_options, SolveOptions};

use common::{oracle, random_block, rng};
use num_bigint::BigUint;
use rand_core::RngCore;

fn verdict(criterion: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion:2} {}: {} ({detail})",
        name,
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} {name}: {detail}");
}

#[test]
fn criterion_01_roundtrip_soundness() {
    let started = Instant::now();
    let key = Key::new(101, 202, 303);
    let corpus = gen_corpus(100, 256, 11);
    let mut worst = 0i16;
    for img in &corpus {
        let (cipher, wmap) = etcs_encrypt(img, &key, 8, 8).unwrap();
        assert!(wmap.is_permutation(), "equivalent key must be a permutation");
        let back = etcs_decrypt(&cipher, &key, 8, 8).unwrap();
        let max_err = img
            .samples()
            .iter()
            .zip(back.samples())
            .map(|(&a, &b)| (a as i16 - b as i16).abs())
            .max()
            .unwrap();
        worst = worst.max(max_err);
    }
    let elapsed = started.elapsed();
    verdict(
        1,
        "round-trip soundness",
        worst <= 1 && elapsed.as_secs() < 60,
        &format!("100 images, worst per-sample error {worst}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_02_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = rng(2024);
    let mut worst_rel = 0.0f64;
    let mut ssd_exact = true;
    for _ in 0..1000 {
        let a = random_block(&mut rng, 8, 1);
        let b = random_block(&mut rng, 8, 1);
        let s_u = (rng.next_u32() % 4) as u8;
        for k in 0..16usize {
            let (s_v, i, t, _) = PuzzleKind::Type1.unpack(k);
            let cfg = MatchConfig::new(0, 1, s_u, s_v, i, t);
            let ssd_lib = etclab::compat::ssd_score(&a, &b, &cfg).unwrap();
            let ssd_ref = oracle::ssd(&a, &b, &cfg);
            ssd_exact &= ssd_lib == ssd_ref;
            for (lib, refv) in [
                (etclab::compat::mgc_score(&a, &b, &cfg).unwrap(), oracle::mgc(&a, &b, &cfg)),
                (etclab::compat::emgc_score(&a, &b, &cfg).unwrap(), oracle::emgc(&a, &b, &cfg)),
            ] {
                let rel = (lib - refv).abs() / refv.abs().max(1e-30);
                worst_rel = worst_rel.max(rel);
            }
        }
    }
    let elapsed = started.elapsed();
    verdict(
        2,
        "metric oracle equivalence",
        ssd_exact && worst_rel <= 1e-6 && elapsed.as_secs() < 60,
        &format!("1000 pairs x16 configs, ssd exact: {ssd_exact}, worst gradient rel err {worst_rel:.2e}, {elapsed:.2?}"),
    );
}

/// Nine seam-matched blocks, scrambled Type-1 style; returns the scrambled
/// blocks, the oracle tensor over them, and the ground-truth map.
fn three_by_three_puzzle(seed: u64) -> (Vec<Block>, ScoreTensor, etclab::cipher::WMap) {
    let mut r = rng(seed);
    // Random block interiors with forced-equal true seams.
    let mut tiles: Vec<Vec<u8>> =
        (0..9).map(|_| (0..64).map(|_| r.next_u32() as u8).collect()).collect();
    for row in 0..3 {
        for col in 0..2 {
            for y in 0..8 {
                let v = tiles[row * 3 + col][y * 8 + 7];
                tiles[row * 3 + col + 1][y * 8] = v;
            }
        }
    }
    for row in 0..2 {
        for col in 0..3 {
            for x in 0..8 {
                let v = tiles[row * 3 + col][7 * 8 + x];
                tiles[(row + 1) * 3 + col][x] = v;
            }
        }
    }
    let plain: Vec<Block> =
        tiles.into_iter().map(|d| Block::new(8, 8, 1, d).unwrap()).collect();

    // Scramble: random permutation + random variant per position.
    let mut order: Vec<usize> = (0..9).collect();
    for i in (1..9).rev() {
        order.swap(i, (r.next_u32() as usize) % (i + 1));
    }
    let mut cipher_blocks = vec![Block::new(1, 1, 1, vec![0]).unwrap(); 9];
    let mut entries = vec![etclab::cipher::WEntry { position: 0, k: 0, c: 0 }; 9];
    for (pos, &src) in order.iter().enumerate() {
        let k = (r.next_u32() % 16) as u8;
        let st = BlockState::from_variant_index(k);
        cipher_blocks[pos] = transform_block(&plain[src], st).unwrap();
        entries[src] = etclab::cipher::WEntry { position: pos, k, c: 0 };
    }
    let truth = etclab::cipher::WMap::new(entries, false);

    // Oracle tensor: brute-force boundary scores of the scrambled blocks.
    let mut data = vec![0f32; 9 * 4 * 9 * 16];
    for u in 0..9 {
        for s_u in 0..4u8 {
            for v in 0..9 {
                for k in 0..16usize {
                    let (s_v, i, t, _) = PuzzleKind::Type1.unpack(k);
                    let cfg = MatchConfig::new(u, v, s_u, s_v, i, t);
                    let w = oracle::ssd(&cipher_blocks[u], &cipher_blocks[v], &cfg) as f32;
                    data[((u * 4 + s_u as usize) * 9 + v) * 16 + k] = w;
                }
            }
        }
    }
    let tensor = ScoreTensor::from_dense(9, PuzzleKind::Type1, 8, data, true).unwrap();
    (cipher_blocks, tensor, truth)
}

/// Count complete 3x3 fillings whose every internal seam scores zero.
fn enumerate_zero_fillings(tensor: &ScoreTensor) -> usize {
    fn recurse(tensor: &ScoreTensor, filled: &mut Vec<(usize, usize)>, used: &mut [bool]) -> usize {
        let cell = filled.len();
        if cell == 9 {
            return 1;
        }
        let (cx, cy) = (cell % 3, cell / 3);
        let mut count = 0;
        for block in 0..9 {
            if used[block] {
                continue;
            }
            for k in 0..16usize {
                let st = BlockState::from_variant_index(k as u8);
                let ok_left = if cx == 0 {
                    true
                } else {
                    let (lb, lk) = filled[cell - 1];
                    let ls = BlockState::from_variant_index(lk as u8);
                    let cfg = etclab::compat::placed_config(lb, ls, block, st, 1);
                    tensor.get(lb, cfg.s_u, block, PuzzleKind::Type1.pack_config(&cfg))
                        == Some(0.0)
                };
                if !ok_left {
                    continue;
                }
                let ok_top = if cy == 0 {
                    true
                } else {
                    let (tb, tk) = filled[cell - 3];
                    let ts = BlockState::from_variant_index(tk as u8);
                    let cfg = etclab::compat::placed_config(tb, ts, block, st, 2);
                    tensor.get(tb, cfg.s_u, block, PuzzleKind::Type1.pack_config(&cfg))
                        == Some(0.0)
                };
                if !ok_top {
                    continue;
                }
                used[block] = true;
                filled.push((block, k));
                count += recurse(tensor, filled, used);
                filled.pop();
                used[block] = false;
            }
        }
        count
    }
    recurse(tensor, &mut Vec::new(), &mut [false; 9])
}

#[test]
fn criterion_03_small_puzzle_optimality() {
    let started = Instant::now();
    let mut solved = 0;
    let mut unique = 0;
    for seed in 0..50u64 {
        let (_, tensor, truth) = three_by_three_puzzle(1000 + seed);
        let assembly = solve(&tensor, 9);
        let grid = etclab::imgcore::BlockGrid {
            block_width: 8,
            block_height: 8,
            x: 3,
            y: 3,
            n: 9,
        };
        let nc = neighbor_comparison(
            &assembly,
            &truth,
            &grid,
            1,
            Correctness::FullState { include_color: false },
        );
        if assembly.complete && nc == 1.0 {
            solved += 1;
        }
        // Global pose x NPT toggle gives 16 equivalent fillings; exactly
        // those must exist.
        if enumerate_zero_fillings(&tensor) == 16 {
            unique += 1;
        }
    }
    let elapsed = started.elapsed();
    verdict(
        3,
        "small-puzzle optimality",
        solved == 50 && unique == 50 && elapsed.as_secs() < 60,
        &format!("solved {solved}/50, unique {unique}/50, {elapsed:.2?}"),
    );
}

fn coa_run(
    corpus: &[PlanarImage],
    key: &Key,
    quality: u8,
    osn: Option<&OsnProfile>,
) -> (f64, f64, f64) {
    let profile = CodecProfile::gray(quality);
    let mut ciphers = Vec::new();
    let mut truth = None;
    for img in corpus {
        let (c, w) = etcs_encrypt(img, key, 8, 8).unwrap();
        let once = jpeg_roundtrip(&c, &profile).unwrap();
        let through = match osn {
            Some(p) => osn_channel(&once, p).unwrap(),
            None => once,
        };
        ciphers.push(through);
        truth = Some(w);
    }
    let truth = truth.unwrap();
    let tensor = score_all(&ciphers, Metric::Mgc, PuzzleKind::Type1, 8).unwrap();
    let (_, grid) = split_blocks(&ciphers[0], 8, 8).unwrap();
    let accuracy = metric_accuracy(&tensor, &truth, &grid);
    let assembly = solve(&tensor, tensor.n() / 3);
    let mode = Correctness::standard(PuzzleKind::Type1);
    let nc = neighbor_comparison(&assembly, &truth, &grid, 3, mode);
    let lc = largest_component(&assembly, &truth, &grid, 3, mode);
    (accuracy, nc, lc)
}

#[test]
fn criterion_04_coa_desk_scale() {
    let started = Instant::now();
    let corpus = gen_corpus(16, 256, 21);
    let (_, nc, lc) = coa_run(&corpus, &Key::new(31, 41, 59), 95, None);
    let elapsed = started.elapsed();
    verdict(
        4,
        "ciphertext-only desk scale",
        nc >= 0.92 && lc >= 0.92 && elapsed.as_secs() < 1800,
        &format!("M=16 q=95 mgc: nc={nc:.4} lc={lc:.4}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_05_metric_accuracy_curve() {
    let started = Instant::now();
    let key = Key::new(27, 18, 28);
    let corpus = gen_corpus(20, 256, 31);
    let profile = CodecProfile::gray(95);
    let ciphers: Vec<PlanarImage> = corpus
        .iter()
        .map(|img| {
            let (c, _) = etcs_encrypt(img, &key, 8, 8).unwrap();
            jpeg_roundtrip(&c, &profile).unwrap()
        })
        .collect();
    let truth = etcs_encrypt(&corpus[0], &key, 8, 8).unwrap().1;
    let (_, grid) = split_blocks(&ciphers[0], 8, 8).unwrap();
    let ms = [1usize, 2, 4, 8, 12, 16, 20];
    let mut curve = Vec::new();
    for &m in &ms {
        let tensor = score_all(&ciphers[..m], Metric::Mgc, PuzzleKind::Type1, 8).unwrap();
        curve.push(metric_accuracy(&tensor, &truth, &grid));
    }
    let monotone = curve.windows(2).all(|w| w[1] >= w[0] - 0.03);
    let elapsed = started.elapsed();
    verdict(
        5,
        "metric accuracy curve",
        curve[0] <= 0.15 && *curve.last().unwrap() >= 0.85 && monotone,
        &format!(
            "m={ms:?} accuracy={:?} monotone(+-0.03)={monotone}, {elapsed:.2?}",
            curve.iter().map(|a| (a * 1e4).round() / 1e4).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_06_kpa_exactness() {
    let started = Instant::now();
    let corpus = gen_corpus(10, 256, 41);
    let key = Key::new(3, 1, 4);
    let mut perfect = 0usize;
    let mut q80_total = 0.0;
    for img in &corpus {
        let (cipher, truth) = etcs_encrypt(img, &key, 8, 8).unwrap();
        let p100 = CodecProfile::gray(100);
        let lossy = jpeg_roundtrip(&cipher, &p100).unwrap();
        let est = kpa_exact(img, &lossy, 8, Some(&p100)).unwrap();
        if w_accuracy(&est, &truth) == 1.0 {
            perfect += 1;
        }
        let p80 = CodecProfile::gray(80);
        let lossy = jpeg_roundtrip(&cipher, &p80).unwrap();
        let est = kpa_exact(img, &lossy, 8, Some(&p80)).unwrap();
        q80_total += w_accuracy(&est, &truth);
    }
    let q80_mean = q80_total / corpus.len() as f64;
    let elapsed = started.elapsed();
    verdict(
        6,
        "plaintext attack exactness",
        perfect == 10 && q80_mean >= 0.85,
        &format!("q=100 perfect {perfect}/10, q=80 mean accuracy {q80_mean:.4}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_07_formula_checks() {
    let p = kpa_probability(3072, 64);
    let exact_tail = p.at_least_one_minus_pow10(100);
    let c1 = kpa_candidates(&[(1, 1), (1, 1), (1, 1)]).unwrap() == BigUint::from(1u32);
    let c2 = kpa_candidates(&[(2, 3)]).unwrap() == BigUint::from(6u32);
    let c3 = kpa_candidates(&[(1, 2), (2, 2)]).unwrap() == BigUint::from(4u32);
    let c4 = kpa_candidates(&[(2, 4), (3, 3)]).unwrap() == BigUint::from(12u32 * 6u32);
    verdict(
        7,
        "closed-form checks",
        exact_tail && c1 && c2 && c3 && c4,
        &format!("p(3072,64) >= 1-1e-100: {exact_tail}; candidate cases {c1} {c2} {c3} {c4}"),
    );
}

#[test]
fn criterion_08_cpa_end_to_end() {
    let started = Instant::now();
    let profile = CodecProfile::gray(90);
    let key = Key::new(8, 88, 888);
    let mut pass = true;
    for seed in 0..5u64 {
        let chosen = cpa_construct(64, 64, &profile, seed).unwrap();
        pass &= variants_distinct(&chosen, &profile).unwrap();
        let (cipher, truth) = etcs_encrypt(&chosen, &key, 8, 8).unwrap();
        let lossy = jpeg_roundtrip(&cipher, &profile).unwrap();
        let est = kpa_exact(&chosen, &lossy, 8, Some(&profile)).unwrap();
        pass &= w_accuracy(&est, &truth) == 1.0;
        pass &= est.candidate_count == BigUint::from(1u32);
    }
    let elapsed = started.elapsed();
    verdict(
        8,
        "chosen-plaintext end to end",
        pass,
        &format!("5 seeds, 64x64, q=90: distinct + exact recovery, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_09_etc_comparative() {
    let started = Instant::now();
    let profile = CodecProfile::color(95, Subsampling::S420);

    // Headline run at M=12.
    let corpus = gen_corpus(12, 256, 51);
    let key = Key::new(9, 99, 999);
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
    let assembly = solve(&tensor, tensor.n());
    let nc =
        neighbor_comparison(&assembly, &truth, &grid, 1, Correctness::standard(PuzzleKind::Etc));

    // Voting comparison over 10 independent runs at the same M=12, q=95
    // setting on a smaller frame.
    let mut voting_ok = 0usize;
    for run in 0..10u64 {
        let corpus = gen_corpus(12, 128, 600 + run);
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
        let nc_voted = neighbor_comparison(&voted, &truth, &grid, 1, strict);
        let nc_unvoted = neighbor_comparison(&unvoted, &truth, &grid, 1, strict);
        if nc_voted >= nc_unvoted {
            voting_ok += 1;
        }
    }
    let elapsed = started.elapsed();
    verdict(
        9,
        "color-scheme behaviour",
        nc >= 0.90 && voting_ok == 10,
        &format!("M=12 q=95 color-ignoring nc={nc:.4}; voting no worse in {voting_ok}/10 runs, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_10_osn_channel_robustness() {
    let started = Instant::now();
    let corpus = gen_corpus(16, 256, 61);
    let key = Key::new(7, 77, 777);
    let (_, nc_plain, _) = coa_run(&corpus, &key, 71, None);
    let osn = OsnProfile { quality: 71, smoothing: 0 };
    let (_, nc_osn, _) = coa_run(&corpus, &key, 95, Some(&osn));
    let delta = (nc_plain - nc_osn).abs();
    let elapsed = started.elapsed();
    verdict(
        10,
        "simulated-platform robustness",
        delta <= 0.15,
        &format!("M=16: plain q71 nc={nc_plain:.4}, platform 95->71 nc={nc_osn:.4}, |delta|={delta:.4}, {elapsed:.2?}"),
    );
}
