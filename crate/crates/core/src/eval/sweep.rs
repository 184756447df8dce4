//! Experiment sweeps over (metric, quality, image count) cells with
//! plot-ready CSV output. Deterministic for a fixed config.

use std::path::PathBuf;

use crate::attacks::{kpa_exact, w_accuracy};
use crate::cipher::{etc_encrypt, etcs_encrypt, etcs_encrypt_rotations, Key, Scheme, WMap};
use crate::codec::{jpeg_roundtrip, osn_channel, CodecProfile, OsnProfile, Subsampling, CODEC_ID};
use crate::compat::{metric_accuracy, score_all, Metric, PuzzleKind};
use crate::error::{Error, Result};
use crate::eval::corpus::gen_corpus;
use crate::eval::measures::{channel_groups, largest_component, neighbor_comparison, Correctness};
use crate::imgcore::{read_png, split_blocks, PlanarImage};
use crate::solver::solve;
use crate::DECISIONS_FINGERPRINT;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackKind {
    Coa,
    Kpa,
}

/// One sweep definition, parsed from line-oriented `key=value` text.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub scheme: Scheme,
    pub puzzle: PuzzleKind,
    pub metrics: Vec<Metric>,
    pub qualities: Vec<u8>,
    pub ms: Vec<usize>,
    pub size: usize,
    pub seed: u64,
    pub key: Key,
    pub solve: bool,
    pub attack: AttackKind,
    pub subsampling: Subsampling,
    pub osn: Option<OsnProfile>,
    pub corpus_dir: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            scheme: Scheme::Etcs,
            puzzle: PuzzleKind::Type1,
            metrics: vec![Metric::Mgc],
            qualities: vec![95],
            ms: vec![1, 4, 8, 12, 16],
            size: 256,
            seed: 1,
            key: Key::new(1, 2, 3),
            solve: false,
            attack: AttackKind::Coa,
            subsampling: Subsampling::S420,
            osn: None,
            corpus_dir: None,
        }
    }
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SweepConfig::default();
        let mut osn_quality: Option<u8> = None;
        let mut osn_smoothing = 0usize;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Format(format!("line {}: bad {what}", lineno + 1));
            match key {
                "scheme" => {
                    cfg.scheme = match value {
                        "etcs" => Scheme::Etcs,
                        "etc" => Scheme::Etc,
                        _ => return Err(bad("scheme")),
                    };
                    if cfg.scheme == Scheme::Etc {
                        cfg.puzzle = PuzzleKind::Etc;
                    }
                }
                "puzzle" => {
                    cfg.puzzle = match value {
                        "type0" => PuzzleKind::Type0,
                        "type1" => PuzzleKind::Type1,
                        "etc" => PuzzleKind::Etc,
                        _ => return Err(bad("puzzle")),
                    }
                }
                "metric" => {
                    cfg.metrics = value
                        .split(',')
                        .map(|m| Metric::parse(m.trim()))
                        .collect::<Result<_>>()?;
                }
                "quality" => {
                    cfg.qualities = value
                        .split(',')
                        .map(|q| q.trim().parse().map_err(|_| bad("quality")))
                        .collect::<Result<_>>()?;
                }
                "m" => {
                    cfg.ms = value
                        .split(',')
                        .map(|m| m.trim().parse().map_err(|_| bad("m")))
                        .collect::<Result<_>>()?;
                }
                "size" => cfg.size = value.parse().map_err(|_| bad("size"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                "key" => {
                    let parts: Vec<&str> = value.split(',').collect();
                    if parts.len() != 3 {
                        return Err(bad("key (want k1,k2,k3)"));
                    }
                    cfg.key = Key::new(
                        parts[0].trim().parse().map_err(|_| bad("key"))?,
                        parts[1].trim().parse().map_err(|_| bad("key"))?,
                        parts[2].trim().parse().map_err(|_| bad("key"))?,
                    );
                }
                "solve" => cfg.solve = value == "true" || value == "1",
                "attack" => {
                    cfg.attack = match value {
                        "coa" => AttackKind::Coa,
                        "kpa" => AttackKind::Kpa,
                        _ => return Err(bad("attack")),
                    }
                }
                "subsampling" => {
                    cfg.subsampling = match value {
                        "444" => Subsampling::S444,
                        "420" => Subsampling::S420,
                        "422" => Subsampling::S422,
                        _ => return Err(bad("subsampling")),
                    }
                }
                "osn_quality" => osn_quality = Some(value.parse().map_err(|_| bad("osn_quality"))?),
                "osn_smoothing" => {
                    osn_smoothing = value.parse().map_err(|_| bad("osn_smoothing"))?
                }
                "corpus" => cfg.corpus_dir = Some(PathBuf::from(value)),
                other => return Err(Error::Format(format!("unknown key {other}"))),
            }
        }
        if let Some(q) = osn_quality {
            cfg.osn = Some(OsnProfile { quality: q, smoothing: osn_smoothing });
        }
        Ok(cfg)
    }
}

/// One result row.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub scheme: Scheme,
    pub puzzle: PuzzleKind,
    pub metric: Option<Metric>,
    pub quality: u8,
    pub m: usize,
    pub width: usize,
    pub height: usize,
    pub metric_accuracy: Option<f64>,
    pub nc: Option<f64>,
    pub lc: Option<f64>,
    pub w_accuracy: Option<f64>,
}

pub const CSV_HEADER: &str =
    "scheme,puzzle,metric,quality,m,width,height,metric_accuracy,nc,lc,w_accuracy,codec,fingerprint";

impl EvalReport {
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.scheme.label(),
            self.puzzle.label(),
            self.metric.map(|m| m.label()).unwrap_or(""),
            self.quality,
            self.m,
            self.width,
            self.height,
            opt(self.metric_accuracy),
            opt(self.nc),
            opt(self.lc),
            opt(self.w_accuracy),
            CODEC_ID,
            DECISIONS_FINGERPRINT,
        )
    }
}

fn load_corpus(cfg: &SweepConfig, count: usize) -> Result<Vec<PlanarImage>> {
    match &cfg.corpus_dir {
        None => Ok(gen_corpus(count, cfg.size, cfg.seed)),
        Some(dir) => {
            let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "png"))
                .collect();
            paths.sort();
            if paths.len() < count {
                return Err(Error::invalid(format!(
                    "corpus has {} images, need {count}",
                    paths.len()
                )));
            }
            paths.iter().take(count).map(|p| read_png(p)).collect()
        }
    }
}

fn encrypt_one(cfg: &SweepConfig, img: &PlanarImage) -> Result<(PlanarImage, WMap)> {
    match (cfg.scheme, cfg.puzzle) {
        (Scheme::Etcs, PuzzleKind::Type0) => etcs_encrypt_rotations(img, &cfg.key, 8, 8),
        (Scheme::Etcs, _) => etcs_encrypt(img, &cfg.key, 8, 8),
        (Scheme::Etc, _) => etc_encrypt(img, &cfg.key),
    }
}

fn channel_profile(cfg: &SweepConfig, quality: u8) -> CodecProfile {
    match cfg.scheme {
        Scheme::Etcs => CodecProfile::gray(quality),
        Scheme::Etc => CodecProfile::color(quality, cfg.subsampling),
    }
}

/// Run every (metric, quality, m) cell and emit plot-ready CSV (m on the x
/// axis). Two runs with the same config produce identical bytes.
pub fn run_sweep(cfg: &SweepConfig) -> Result<String> {
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for report in run_sweep_reports(cfg)? {
        csv.push_str(&report.csv_row());
        csv.push('\n');
    }
    Ok(csv)
}

pub fn run_sweep_reports(cfg: &SweepConfig) -> Result<Vec<EvalReport>> {
    match cfg.attack {
        AttackKind::Coa => sweep_coa(cfg),
        AttackKind::Kpa => sweep_kpa(cfg),
    }
}

fn sweep_coa(cfg: &SweepConfig) -> Result<Vec<EvalReport>> {
    let max_m = cfg.ms.iter().max().copied().unwrap_or(0);
    let corpus = load_corpus(cfg, max_m)?;
    let mut encrypted = Vec::with_capacity(corpus.len());
    let mut truth: Option<WMap> = None;
    for img in &corpus {
        let (cipher, map) = encrypt_one(cfg, img)?;
        debug_assert!(truth.as_ref().map_or(true, |t| *t == map));
        truth = Some(map);
        encrypted.push(cipher);
    }
    let block = if cfg.puzzle == PuzzleKind::Etc { 16 } else { 8 };
    let mut reports = Vec::new();
    for &quality in &cfg.qualities {
        let profile = channel_profile(cfg, quality);
        let channelled: Vec<PlanarImage> = encrypted
            .iter()
            .map(|c| {
                let once = jpeg_roundtrip(c, &profile)?;
                match &cfg.osn {
                    Some(osn) => osn_channel(&once, osn),
                    None => Ok(once),
                }
            })
            .collect::<Result<_>>()?;
        for &metric in &cfg.metrics {
            for &m in &cfg.ms {
                if m == 0 || m > channelled.len() {
                    continue;
                }
                let tensor = score_all(&channelled[..m], metric, cfg.puzzle, block)?;
                let truth_map = truth.as_ref().expect("nonempty corpus");
                let (_, grid) = split_blocks(&channelled[0], block, block)?;
                let accuracy = metric_accuracy(&tensor, truth_map, &grid);
                let (nc, lc) = if cfg.solve {
                    let cap =
                        if cfg.puzzle == PuzzleKind::Etc { tensor.n() } else { tensor.n() / 3 };
                    let assembly = solve(&tensor, cap);
                    let mode = Correctness::standard(cfg.puzzle);
                    let groups = channel_groups(cfg.puzzle);
                    (
                        Some(neighbor_comparison(&assembly, truth_map, &grid, groups, mode)),
                        Some(largest_component(&assembly, truth_map, &grid, groups, mode)),
                    )
                } else {
                    (None, None)
                };
                reports.push(EvalReport {
                    scheme: cfg.scheme,
                    puzzle: cfg.puzzle,
                    metric: Some(metric),
                    quality,
                    m,
                    width: corpus[0].width(),
                    height: corpus[0].height(),
                    metric_accuracy: Some(accuracy),
                    nc,
                    lc,
                    w_accuracy: None,
                });
            }
        }
    }
    Ok(reports)
}

fn sweep_kpa(cfg: &SweepConfig) -> Result<Vec<EvalReport>> {
    if cfg.scheme != Scheme::Etcs {
        return Err(Error::invalid("the exact plaintext attack applies to the flattened scheme"));
    }
    let corpus = load_corpus(cfg, 1)?;
    let plain = &corpus[0];
    let (cipher, truth) = encrypt_one(cfg, plain)?;
    let mut reports = Vec::new();
    for &quality in &cfg.qualities {
        let profile = channel_profile(cfg, quality);
        let lossy = jpeg_roundtrip(&cipher, &profile)?;
        let lossy = match &cfg.osn {
            Some(osn) => osn_channel(&lossy, osn)?,
            None => lossy,
        };
        let est = kpa_exact(plain, &lossy, 8, Some(&profile))?;
        reports.push(EvalReport {
            scheme: cfg.scheme,
            puzzle: cfg.puzzle,
            metric: None,
            quality,
            m: 1,
            width: plain.width(),
            height: plain.height(),
            metric_accuracy: None,
            nc: None,
            lc: None,
            w_accuracy: Some(w_accuracy(&est, &truth)),
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parses_and_defaults() {
        let cfg = SweepConfig::parse(
            "scheme=etcs\nmetric=mgc,ssd\nquality=95,47\nm=1,2\nsize=64\nseed=9\nkey=4,5,6\nsolve=true\n",
        )
        .unwrap();
        assert_eq!(cfg.metrics.len(), 2);
        assert_eq!(cfg.qualities, vec![95, 47]);
        assert_eq!(cfg.key, Key::new(4, 5, 6));
        assert!(cfg.solve);
        assert!(SweepConfig::parse("nonsense=1").is_err());
    }

    #[test]
    fn empty_m_list_yields_header_only() {
        let mut cfg = SweepConfig::default();
        cfg.ms.clear();
        cfg.size = 32;
        let csv = run_sweep(&cfg).unwrap();
        assert_eq!(csv.trim(), CSV_HEADER);
    }

    #[test]
    fn sweep_is_deterministic() {
        let cfg = SweepConfig {
            size: 32,
            ms: vec![1, 2],
            qualities: vec![90],
            ..Default::default()
        };
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.lines().count() == 1 + 2);
    }
}
