//! Scratch driver for tuning: runs the ciphertext-only pipeline at a given
//! size and prints metric accuracy, assembly scores, and wall time.

use std::time::Instant;

use etclab::cipher::{etcs_encrypt, Key};
use etclab::codec::{jpeg_roundtrip, CodecProfile};
use etclab::compat::{metric_accuracy, score_all, Metric, PuzzleKind};
use etclab::eval::{gen_corpus, largest_component, neighbor_comparison, Correctness};
use etclab::imgcore::split_blocks;
use etclab::solver::solve;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let size: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(128);
    let m: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(8);
    let quality: u8 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(95);
    let metric = match args.get(4).map(|s| s.as_str()) {
        Some("ssd") => Metric::Ssd,
        Some("emgc") => Metric::Emgc,
        _ => Metric::Mgc,
    };

    let t0 = Instant::now();
    let corpus = gen_corpus(m, size, 1);
    println!("corpus: {:?}", t0.elapsed());

    let key = Key::new(11, 22, 33);
    let profile = CodecProfile::gray(quality);
    let t1 = Instant::now();
    let mut ciphers = Vec::new();
    let mut truth = None;
    for img in &corpus {
        let (c, w) = etcs_encrypt(img, &key, 8, 8).unwrap();
        ciphers.push(jpeg_roundtrip(&c, &profile).unwrap());
        truth = Some(w);
    }
    let truth = truth.unwrap();
    println!("encrypt+jpeg: {:?}", t1.elapsed());

    let t2 = Instant::now();
    let tensor = score_all(&ciphers, metric, PuzzleKind::Type1, 8).unwrap();
    println!("score_all: {:?} (n={})", t2.elapsed(), tensor.n());

    let (_, grid) = split_blocks(&ciphers[0], 8, 8).unwrap();
    let t3 = Instant::now();
    let acc = metric_accuracy(&tensor, &truth, &grid);
    println!("metric_accuracy: {acc:.4} ({:?})", t3.elapsed());

    let t4 = Instant::now();
    let assembly = solve(&tensor, tensor.n() / 3);
    let mode = Correctness::standard(PuzzleKind::Type1);
    let nc = neighbor_comparison(&assembly, &truth, &grid, 3, mode);
    let lc = largest_component(&assembly, &truth, &grid, 3, mode);
    println!(
        "solve: {:?}  fragments={} complete={} nc={nc:.4} lc={lc:.4}",
        t4.elapsed(),
        assembly.fragment_count,
        assembly.complete
    );
    let mut sizes: Vec<usize> = assembly.fragments().values().map(|v| v.len()).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    println!("fragment sizes: {:?}", &sizes[..sizes.len().min(12)]);
    println!("total: {:?}", t0.elapsed());
}
