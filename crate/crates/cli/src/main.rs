//! Command-line surface: encryption, decryption, the three attacks,
//! channel simulation, corpus generation, and evaluation sweeps.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use etclab::attacks::{
    coa, cpa_construct, cpa_refine, kpa_exact, kpa_similarity, variants_distinct, w_accuracy,
    CoaOptions,
};
use etclab::cipher::{
    etc_decrypt, etc_encrypt, etcs_decrypt, etcs_encrypt, etcs_encrypt_rotations, Key, Scheme,
    WMap,
};
use etclab::codec::{
    jpeg_decode, jpeg_encode, jpeg_roundtrip, osn_channel, CodecProfile, OsnProfile, Subsampling,
    CODEC_ID,
};
use etclab::compat::{Metric, PuzzleKind};
use etclab::eval::{
    channel_groups, gen_corpus, largest_component, neighbor_comparison, run_sweep, Correctness,
    SweepConfig,
};
use etclab::imgcore::{read_png, split_blocks, write_png, PlanarImage};
use etclab::solver::compose_recovered_color;
use etclab::DECISIONS_FINGERPRINT;

#[derive(Parser)]
#[command(name = "etclab", version, about = "Block-permutation encryption-then-compression workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SchemeArg {
    Etcs,
    Etc,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Etcs => Scheme::Etcs,
            SchemeArg::Etc => Scheme::Etc,
        }
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum MetricArg {
    Ssd,
    Mgc,
    Emgc,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Metric {
        match m {
            MetricArg::Ssd => Metric::Ssd,
            MetricArg::Mgc => Metric::Mgc,
            MetricArg::Emgc => Metric::Emgc,
        }
    }
}

fn parse_key(s: &str) -> std::result::Result<Key, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("key must be k1,k2,k3".into());
    }
    let read = |p: &str| p.trim().parse::<u64>().map_err(|e| e.to_string());
    Ok(Key::new(read(parts[0])?, read(parts[1])?, read(parts[2])?))
}

fn parse_subsampling(s: &str) -> std::result::Result<Subsampling, String> {
    match s {
        "444" => Ok(Subsampling::S444),
        "420" => Ok(Subsampling::S420),
        "422" => Ok(Subsampling::S422),
        _ => Err("subsampling must be 444, 420, or 422".into()),
    }
}

#[derive(Args)]
struct CommonEncrypt {
    #[arg(long, value_enum, default_value = "etcs")]
    scheme: SchemeArg,
    #[arg(long, value_parser = parse_key)]
    key: Key,
    /// Block size for the flattened scheme (the color scheme is fixed at 16).
    #[arg(long, default_value_t = 8)]
    block: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key (three 64-bit subkeys, printed as k1,k2,k3).
    Keygen {
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Encrypt a PNG plain-image; `.jpg`/`.jpeg` outputs are compressed at
    /// the given quality, `.png` outputs stay lossless.
    Encrypt {
        #[command(flatten)]
        common: CommonEncrypt,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 95)]
        quality: u8,
        #[arg(long, value_parser = parse_subsampling, default_value = "420")]
        subsampling: Subsampling,
        /// Also write the ground-truth equivalent key here.
        #[arg(long)]
        wmap: Option<PathBuf>,
        /// Permutation-and-rotation-only variant of the flattened scheme.
        #[arg(long, default_value_t = false)]
        rotations_only: bool,
    },
    /// Decrypt a cipher-image (PNG or JPEG) back to a PNG plain-image.
    Decrypt {
        #[command(flatten)]
        common: CommonEncrypt,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an attack.
    #[command(subcommand)]
    Attack(AttackCommand),
    /// Evaluation drivers.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Push an already-compressed image through the simulated sharing
    /// platform (re-encode at the given quality, optional smoothing).
    SimulateOsn {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        quality: u8,
        #[arg(long, default_value_t = 0)]
        smoothing: usize,
    },
    /// Generate the deterministic synthetic corpus.
    GenCorpus {
        #[arg(long, default_value_t = 16)]
        count: usize,
        #[arg(long, default_value_t = 256)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum AttackCommand {
    /// Ciphertext-only attack over a directory of cipher-images.
    Coa {
        #[arg(long, value_enum, default_value = "etcs")]
        scheme: SchemeArg,
        /// Treat the flattened scheme as permutation+rotation only.
        #[arg(long, default_value_t = false)]
        type0: bool,
        #[arg(long, value_enum, default_value = "mgc")]
        metric: MetricArg,
        /// Directory of cipher-images (.png/.jpg), sorted by name.
        #[arg(long)]
        inputs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Ground-truth map for scoring.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Exact known-plaintext attack on the flattened scheme.
    Kpa {
        #[arg(long)]
        plain: PathBuf,
        #[arg(long)]
        cipher: PathBuf,
        /// Quality of the channel both sides ran through; omit for a
        /// lossless channel.
        #[arg(long)]
        quality: Option<u8>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Similarity-based plaintext attack (channel need not be exact).
    KpaSim {
        #[arg(long, value_enum, default_value = "etcs")]
        scheme: SchemeArg,
        #[arg(long)]
        plain: PathBuf,
        #[arg(long)]
        cipher: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Construct (or refine) a chosen plain-image.
    CpaBuild {
        #[arg(long, default_value_t = 256)]
        width: usize,
        #[arg(long, default_value_t = 256)]
        height: usize,
        #[arg(long, default_value_t = 95)]
        quality: u8,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Refine this natural image instead of generating noise blocks.
        #[arg(long)]
        refine: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Run a sweep from a key=value config file and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_image(path: &Path) -> Result<PlanarImage> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let img = match ext {
        "png" => read_png(path)?,
        "jpg" | "jpeg" => jpeg_decode(&fs::read(path)?)?,
        other => bail!("unsupported image extension {other:?}"),
    };
    Ok(img)
}

fn stamp() -> String {
    format!("# codec={CODEC_ID} decisions={DECISIONS_FINGERPRINT}\n")
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Keygen { seed } => {
            use rand_core::{RngCore, SeedableRng};
            let seed = seed.unwrap_or_else(|| {
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_nanos() as u64)
                    .unwrap_or(0)
            });
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            println!("{},{},{}", rng.next_u64(), rng.next_u64(), rng.next_u64());
        }
        Command::Encrypt { common, input, out, quality, subsampling, wmap, rotations_only } => {
            let plain = read_image(&input)?;
            let (cipher, map) = match common.scheme.into() {
                Scheme::Etcs if rotations_only => {
                    etcs_encrypt_rotations(&plain, &common.key, common.block, common.block)?
                }
                Scheme::Etcs => etcs_encrypt(&plain, &common.key, common.block, common.block)?,
                Scheme::Etc => etc_encrypt(&plain, &common.key)?,
            };
            write_image_by_ext(&cipher, &out, quality, subsampling)?;
            if let Some(path) = wmap {
                fs::write(&path, stamp() + &map.to_text())?;
            }
            println!("encrypted {} blocks -> {}", map.len(), out.display());
        }
        Command::Decrypt { common, input, out } => {
            let cipher = read_image(&input)?;
            let plain = match common.scheme.into() {
                Scheme::Etcs => etcs_decrypt(&cipher, &common.key, common.block, common.block)?,
                Scheme::Etc => etc_decrypt(&cipher, &common.key)?,
            };
            write_png(&plain, &out)?;
            println!("decrypted -> {}", out.display());
        }
        Command::Attack(attack) => run_attack(attack)?,
        Command::Eval(EvalCommand::Sweep { config, out }) => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg = SweepConfig::parse(&text)?;
            let csv = run_sweep(&cfg)?;
            fs::write(&out, csv)?;
            println!("sweep -> {}", out.display());
        }
        Command::SimulateOsn { input, out, quality, smoothing } => {
            let img = read_image(&input)?;
            let processed = osn_channel(&img, &OsnProfile { quality, smoothing })?;
            write_image_by_ext(&processed, &out, quality, Subsampling::S420)?;
            println!("platform-processed -> {}", out.display());
        }
        Command::GenCorpus { count, size, seed, out } => {
            fs::create_dir_all(&out)?;
            for (i, img) in gen_corpus(count, size, seed).iter().enumerate() {
                write_png(img, &out.join(format!("img_{i:03}.png")))?;
            }
            println!("{count} images -> {}", out.display());
        }
    }
    Ok(())
}

fn write_image_by_ext(
    img: &PlanarImage,
    out: &Path,
    quality: u8,
    subsampling: Subsampling,
) -> Result<()> {
    match out.extension().and_then(|e| e.to_str()).unwrap_or("") {
        "png" => write_png(img, out)?,
        "jpg" | "jpeg" => {
            let profile = CodecProfile {
                quality,
                subsampling,
                grayscale: img.channels() == 1,
            };
            fs::write(out, jpeg_encode(img, &profile)?)?;
        }
        other => bail!("unsupported output extension {other:?}"),
    }
    Ok(())
}

fn run_attack(attack: AttackCommand) -> Result<()> {
    match attack {
        AttackCommand::Coa { scheme, type0, metric, inputs, out, truth } => {
            let mut paths: Vec<PathBuf> = fs::read_dir(&inputs)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    matches!(
                        p.extension().and_then(|e| e.to_str()),
                        Some("png") | Some("jpg") | Some("jpeg")
                    )
                })
                .collect();
            paths.sort();
            if paths.is_empty() {
                bail!("no cipher-images in {}", inputs.display());
            }
            let ciphers: Vec<PlanarImage> =
                paths.iter().map(|p| read_image(p)).collect::<Result<_>>()?;
            let kind = match (scheme.into(), type0) {
                (Scheme::Etc, _) => PuzzleKind::Etc,
                (Scheme::Etcs, true) => PuzzleKind::Type0,
                (Scheme::Etcs, false) => PuzzleKind::Type1,
            };
            let result = coa(&ciphers, metric.into(), kind, CoaOptions::default())?;
            fs::create_dir_all(&out)?;
            for (i, plane) in result.planes.iter().enumerate() {
                write_png(plane, &out.join(format!("plane_{i}.png")))?;
            }
            if kind != PuzzleKind::Etc {
                if let Some(color) = compose_recovered_color(&result.planes) {
                    write_png(&color, &out.join("composite.png"))?;
                }
            }
            fs::write(out.join("assembly.txt"), stamp() + &result.assembly.to_text())?;
            println!(
                "assembled {} blocks into {} fragments (complete: {})",
                result.assembly.n(),
                result.assembly.fragment_count,
                result.assembly.complete
            );
            if let Some(truth_path) = truth {
                let map = WMap::from_text(&fs::read_to_string(&truth_path)?)?;
                let block = if kind == PuzzleKind::Etc { 16 } else { 8 };
                let (_, grid) = split_blocks(&ciphers[0], block, block)?;
                let groups = channel_groups(kind);
                let mode = Correctness::standard(kind);
                let nc = neighbor_comparison(&result.assembly, &map, &grid, groups, mode);
                let lc = largest_component(&result.assembly, &map, &grid, groups, mode);
                println!("nc={nc:.4} lc={lc:.4}");
            }
        }
        AttackCommand::Kpa { plain, cipher, quality, out, truth } => {
            let plain_img = read_image(&plain)?;
            let cipher_img = read_image(&cipher)?;
            let profile = quality.map(CodecProfile::gray);
            let est = kpa_exact(&plain_img, &cipher_img, 8, profile.as_ref())?;
            fs::write(&out, stamp() + &est.to_text())?;
            println!(
                "determined {}/{} elements; {} consistent keys",
                est.determined_count(),
                est.elements.len(),
                est.candidate_count
            );
            if let Some(truth_path) = truth {
                let map = WMap::from_text(&fs::read_to_string(&truth_path)?)?;
                println!("accuracy={:.6}", w_accuracy(&est, &map));
            }
        }
        AttackCommand::KpaSim { scheme, plain, cipher, out, truth } => {
            let plain_img = read_image(&plain)?;
            let cipher_img = read_image(&cipher)?;
            let est = kpa_similarity(&plain_img, &cipher_img, scheme.into())?;
            fs::write(&out, stamp() + &est.to_text())?;
            println!("paired {} elements", est.determined_count());
            if let Some(truth_path) = truth {
                let map = WMap::from_text(&fs::read_to_string(&truth_path)?)?;
                println!("accuracy={:.6}", w_accuracy(&est, &map));
            }
        }
        AttackCommand::CpaBuild { width, height, quality, seed, refine, out } => {
            let profile = CodecProfile::gray(quality);
            let chosen = match refine {
                Some(path) => cpa_refine(&read_image(&path)?, &profile, seed)?,
                None => cpa_construct(width, height, &profile, seed)?,
            };
            debug_assert!(variants_distinct(&chosen, &profile)?);
            write_png(&chosen, &out)?;
            println!("chosen plain-image -> {}", out.display());
        }
    }
    Ok(())
}
