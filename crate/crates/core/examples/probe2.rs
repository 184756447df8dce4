//! Scratch driver for the color scheme, plaintext attacks, and the OSN
//! channel comparisons.

use std::time::Instant;

use etclab::attacks::{kpa_exact, w_accuracy};
use etclab::cipher::{etc_encrypt, etcs_encrypt, Key};
use etclab::codec::{jpeg_roundtrip, osn_channel, CodecProfile, OsnProfile, Subsampling};
use etclab::compat::{metric_accuracy, score_all, Metric, PuzzleKind};
use etclab::eval::{gen_corpus, largest_component, neighbor_comparison, Correctness};
use etclab::imgcore::split_blocks;
use etclab::solver::solve;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mode = args.get(1).cloned().unwrap_or_else(|| "etc".into());
    match mode.as_str() {
        "etc" => run_etc(&args),
        "kpa" => run_kpa(&args),
        "osn" => run_osn(&args),
        other => eprintln!("unknown mode {other}"),
    }
}

fn run_etc(args: &[String]) {
    let m: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(12);
    let quality: u8 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(95);
    let t0 = Instant::now();
    let corpus = gen_corpus(m, 256, 2);
    let key = Key::new(7, 8, 9);
    let profile = CodecProfile::color(quality, Subsampling::S420);
    let mut ciphers = Vec::new();
    let mut truth = None;
    for img in &corpus {
        let (c, w) = etc_encrypt(img, &key).unwrap();
        ciphers.push(jpeg_roundtrip(&c, &profile).unwrap());
        truth = Some(w);
    }
    let truth = truth.unwrap();
    let t1 = Instant::now();
    let tensor = score_all(&ciphers, Metric::Mgc, PuzzleKind::Etc, 16).unwrap();
    println!("score_all: {:?} (n={})", t1.elapsed(), tensor.n());
    let (_, grid) = split_blocks(&ciphers[0], 16, 16).unwrap();
    println!("metric_accuracy(color-aware): {:.4}", metric_accuracy(&tensor, &truth, &grid));
    let assembly = solve(&tensor, tensor.n());
    let mode = Correctness::standard(PuzzleKind::Etc);
    let nc = neighbor_comparison(&assembly, &truth, &grid, 1, mode);
    let lc = largest_component(&assembly, &truth, &grid, 1, mode);
    let strict = Correctness::strict(PuzzleKind::Etc);
    let nc_strict = neighbor_comparison(&assembly, &truth, &grid, 1, strict);
    println!(
        "solve fragments={} complete={} nc={nc:.4} lc={lc:.4} nc_color_strict={nc_strict:.4}",
        assembly.fragment_count, assembly.complete
    );
    println!("total {:?}", t0.elapsed());
}

fn run_kpa(args: &[String]) {
    let quality: u8 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(80);
    let count: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(3);
    let corpus = gen_corpus(count, 256, 3);
    let key = Key::new(10, 20, 30);
    let profile = CodecProfile::gray(quality);
    let t0 = Instant::now();
    let mut total = 0.0;
    for img in &corpus {
        let (cipher, truth) = etcs_encrypt(img, &key, 8, 8).unwrap();
        let lossy = jpeg_roundtrip(&cipher, &profile).unwrap();
        let est = kpa_exact(img, &lossy, 8, Some(&profile)).unwrap();
        let acc = w_accuracy(&est, &truth);
        total += acc;
        println!("kpa q={quality}: {acc:.6}");
    }
    println!("mean {:.6}  ({:?})", total / count as f64, t0.elapsed());
}

fn run_osn(args: &[String]) {
    let m: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(16);
    let key = Key::new(5, 6, 7);
    let corpus = gen_corpus(m, 256, 4);
    let t0 = Instant::now();
    let mut run = |label: &str, via_osn: Option<OsnProfile>, q: u8| {
        let profile = CodecProfile::gray(q);
        let mut ciphers = Vec::new();
        let mut truth = None;
        for img in &corpus {
            let (c, w) = etcs_encrypt(img, &key, 8, 8).unwrap();
            let once = jpeg_roundtrip(&c, &profile).unwrap();
            let through = match &via_osn {
                Some(osn) => osn_channel(&once, osn).unwrap(),
                None => once,
            };
            ciphers.push(through);
            truth = Some(w);
        }
        let truth = truth.unwrap();
        let tensor = score_all(&ciphers, Metric::Mgc, PuzzleKind::Type1, 8).unwrap();
        let (_, grid) = split_blocks(&ciphers[0], 8, 8).unwrap();
        let assembly = solve(&tensor, tensor.n() / 3);
        let mode = Correctness::standard(PuzzleKind::Type1);
        let nc = neighbor_comparison(&assembly, &truth, &grid, 3, mode);
        println!("{label}: nc={nc:.4} fragments={}", assembly.fragment_count);
        nc
    };
    let plain = run("plain q=71", None, 71);
    let osn = run("osn 95->71", Some(OsnProfile { quality: 71, smoothing: 0 }), 95);
    let osn_smooth = run("osn 95->71 smooth3", Some(OsnProfile { quality: 71, smoothing: 3 }), 95);
    println!(
        "delta={:.4} smooth_degrades={} total {:?}",
        (plain - osn).abs(),
        osn_smooth < osn,
        t0.elapsed()
    );
}
