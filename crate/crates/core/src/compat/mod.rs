//! Pairwise compatibility scoring over all match configurations,
//! multi-cipher-image aggregation, second-smallest normalization, and
//! metric-accuracy measurement.

mod seam;
mod tensor;

use crate::cipher::{WEntry, WMap};
use crate::error::{Error, Result};
use crate::imgcore::{
    compose_cperm, compose_dihedral, invert_cperm, opposite_side, transform_block, Block,
    BlockGrid, BlockState, MatchConfig, SIDE_RIGHT,
};

pub use seam::{SeamSide, VAR_EPSILON};
pub use tensor::{score_all, score_all_with_options, MatchRanking, ScoreTensor, TensorOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Ssd,
    Mgc,
    Emgc,
}

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::Ssd => "ssd",
            Metric::Mgc => "mgc",
            Metric::Emgc => "emgc",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ssd" => Ok(Metric::Ssd),
            "mgc" => Ok(Metric::Mgc),
            "emgc" => Ok(Metric::Emgc),
            other => Err(Error::invalid(format!("unknown metric {other}"))),
        }
    }
}

/// Which configuration space a puzzle ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PuzzleKind {
    /// Permutation and rotation only: 4 configurations per ordered pair side.
    Type0,
    /// Adds inversion and negative-positive: 16 configurations.
    Type1,
    /// The color scheme: 16 geometric x 6 channel orders = 96.
    Etc,
}

impl PuzzleKind {
    pub fn config_count(self) -> usize {
        match self {
            PuzzleKind::Type0 => 4,
            PuzzleKind::Type1 => 16,
            PuzzleKind::Etc => 96,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PuzzleKind::Type0 => "type0",
            PuzzleKind::Type1 => "type1",
            PuzzleKind::Etc => "etc",
        }
    }

    /// Pack the (s_v, i, t, c) part of a configuration into a column index.
    pub fn pack(self, s_v: u8, i: bool, t: bool, c: u8) -> usize {
        match self {
            PuzzleKind::Type0 => s_v as usize,
            PuzzleKind::Type1 => s_v as usize * 4 + (i as usize) * 2 + t as usize,
            PuzzleKind::Etc => {
                (s_v as usize * 4 + (i as usize) * 2 + t as usize) * 6 + c as usize
            }
        }
    }

    pub fn unpack(self, k: usize) -> (u8, bool, bool, u8) {
        match self {
            PuzzleKind::Type0 => (k as u8, false, false, 0),
            PuzzleKind::Type1 => ((k / 4) as u8, (k / 2) % 2 == 1, k % 2 == 1, 0),
            PuzzleKind::Etc => {
                let c = (k % 6) as u8;
                let g = k / 6;
                ((g / 4) as u8, (g / 2) % 2 == 1, g % 2 == 1, c)
            }
        }
    }

    pub fn pack_config(self, cfg: &MatchConfig) -> usize {
        self.pack(cfg.s_v, cfg.i, cfg.t, cfg.c)
    }
}

/// Rotate `a` so side `s_u` faces right and transform `b` so side `s_v`
/// faces left with the configured inversion/NPT/channel state applied;
/// the canonical frame every metric is defined on.
pub fn canonical_pair(a: &Block, b: &Block, cfg: &MatchConfig) -> Result<(Block, Block)> {
    let rot_a = (1 + 4 - cfg.s_u % 4) % 4; // side s_u -> right
    let a_canon = transform_block(a, BlockState::new(rot_a, false, false))?;
    let b_canon = transform_block(b, canonical_b_state(cfg))?;
    Ok((a_canon, b_canon))
}

/// The full state applied to the right-hand block in the canonical frame:
/// rotate side s_v to the left, then an upside-down flip for relative
/// inversion (the only reflection that keeps the touching sides in
/// contact), then NPT and the channel shuffle.
pub(crate) fn canonical_b_state(cfg: &MatchConfig) -> BlockState {
    let rot_b = (3 + 4 - cfg.s_v % 4) % 4; // side s_v -> left
    let (r, i) = if cfg.i {
        compose_dihedral((2, true), (rot_b, false)) // up-down flip after rotation
    } else {
        (rot_b, false)
    };
    let mut st = BlockState::new(r, i, cfg.t);
    st.c = cfg.c;
    st
}

fn seam_sides(a: &Block, b: &Block, cfg: &MatchConfig) -> Result<Vec<(SeamSide, SeamSide)>> {
    if a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels() {
        return Err(Error::invalid("blocks must have identical shape"));
    }
    let (ac, bc) = canonical_pair(a, b, cfg)?;
    let (w, h) = (ac.width(), ac.height());
    let mut pairs = Vec::with_capacity(ac.channels());
    for ch in 0..ac.channels() {
        let ap = ac.plane(ch);
        let bp = bc.plane(ch);
        let col = |plane: &[u8], x: usize| -> Vec<f64> {
            (0..h).map(|y| plane[y * w + x] as f64).collect()
        };
        let a_side = SeamSide { edge: col(ap, w - 1), inner: col(ap, w - 2) };
        let b_side = SeamSide { edge: col(bp, 0), inner: col(bp, 1) };
        pairs.push((a_side, b_side));
    }
    Ok(pairs)
}

/// Boundary sum-of-squared-differences under a configuration.
pub fn ssd_score(a: &Block, b: &Block, cfg: &MatchConfig) -> Result<f64> {
    Ok(seam_sides(a, b, cfg)?.iter().map(|(sa, sb)| seam::ssd(sa, sb)).sum())
}

/// Symmetrized Mahalanobis gradient compatibility under a configuration.
pub fn mgc_score(a: &Block, b: &Block, cfg: &MatchConfig) -> Result<f64> {
    if a.width() < 3 {
        return Err(Error::invalid("gradient metrics need at least 3 columns"));
    }
    Ok(seam_sides(a, b, cfg)?.iter().map(|(sa, sb)| seam::mgc(sa, sb)).sum())
}

/// Gradient compatibility extended with the boundary-parallel change term.
pub fn emgc_score(a: &Block, b: &Block, cfg: &MatchConfig) -> Result<f64> {
    if a.width() < 3 {
        return Err(Error::invalid("gradient metrics need at least 3 columns"));
    }
    Ok(seam_sides(a, b, cfg)?.iter().map(|(sa, sb)| seam::emgc(sa, sb)).sum())
}

pub fn score(metric: Metric, a: &Block, b: &Block, cfg: &MatchConfig) -> Result<f64> {
    match metric {
        Metric::Ssd => ssd_score(a, b, cfg),
        Metric::Mgc => mgc_score(a, b, cfg),
        Metric::Emgc => emgc_score(a, b, cfg),
    }
}

/// The configuration that correctly joins two cipher blocks whose plaintext
/// blocks are adjacent in direction `dir` (from u's plaintext block to v's),
/// given the intra-block states the cipher applied to each. The plaintext
/// side toward the neighbour becomes the cipher block's side facing
/// wherever the transform moved it.
pub fn true_config(
    u: usize,
    state_u: BlockState,
    v: usize,
    state_v: BlockState,
    dir: u8,
) -> MatchConfig {
    let s_u = state_u.side_facing(dir);
    let s_v = state_v.side_facing(opposite_side(dir));
    let mut cfg =
        MatchConfig::new(u, v, s_u, s_v, state_u.i ^ state_v.i, state_u.t ^ state_v.t);
    // Relative channel order: the c with compose(c, c_v) = c_u.
    cfg.c = compose_cperm(state_u.c, invert_cperm(state_v.c));
    cfg
}

/// The configuration realised by two PLACED blocks: block `u` rendered
/// through `state_u` with block `v` rendered through `state_v` sitting in
/// direction `dir`. Placement is the inverse relation of encryption, so
/// this is `true_config` on the inverted states.
pub fn placed_config(
    u: usize,
    state_u: BlockState,
    v: usize,
    state_v: BlockState,
    dir: u8,
) -> MatchConfig {
    true_config(u, state_u.inverse(), v, state_v.inverse(), dir)
}

/// All true adjacent cipher-block pairs with their correct configurations,
/// derived from the ground-truth map. For the flattened grayscale layout the
/// per-channel grids are independent, so pairs never span the channel seams.
pub fn true_adjacencies(
    truth: &WMap,
    grid: &BlockGrid,
    channels: usize,
) -> Vec<(MatchConfig, u8)> {
    let n = truth.len();
    let per_channel_x = grid.x / channels;
    let mut out = Vec::new();
    let state_of = |e: &WEntry| BlockState::from_variant_index(e.k).with_cperm(e.c);
    for plain_a in 0..n {
        let (ax, ay) = grid.cell_of(plain_a);
        // Right and down neighbours cover each unordered pair once.
        for (dir, bx, by) in [(SIDE_RIGHT, ax + 1, ay), (2u8, ax, ay + 1)] {
            if bx >= grid.x || by >= grid.y {
                continue;
            }
            if channels > 1 && dir == SIDE_RIGHT && ax / per_channel_x != bx / per_channel_x {
                continue; // crossing a channel seam in the flattened plane
            }
            let plain_b = grid.index_of(bx, by);
            let ea = truth.entry(plain_a);
            let eb = truth.entry(plain_b);
            let cfg = true_config(ea.position, state_of(&ea), eb.position, state_of(&eb), dir);
            out.push((cfg, dir));
        }
    }
    out
}

/// Fraction of true adjacencies whose correct configuration is the best
/// (lowest) entry of its (block, side) slice, counting both directions of
/// every pair.
pub fn metric_accuracy(tensor: &ScoreTensor, truth: &WMap, grid: &BlockGrid) -> f64 {
    let channels = if tensor.kind() == PuzzleKind::Etc { 1 } else { 3 };
    let pairs = true_adjacencies(truth, grid, channels);
    if pairs.is_empty() {
        return 0.0;
    }
    let mut correct = 0usize;
    let mut total = 0usize;
    for (cfg, _) in &pairs {
        for probe in [*cfg, mirror_config(cfg)] {
            total += 1;
            let (best_v, best_k) = tensor.row_argmin(probe.u, probe.s_u);
            if best_v == probe.v && best_k == tensor.kind().pack_config(&probe) {
                correct += 1;
            }
        }
    }
    correct as f64 / total as f64
}

/// The same physical abutment described from the other block's perspective:
/// "side s_u of u touches side s_v of v with relative inversion/NPT parity"
/// reads identically with the roles swapped, and the relative channel order
/// inverts.
pub fn mirror_config(cfg: &MatchConfig) -> MatchConfig {
    let mut m = MatchConfig::new(cfg.v, cfg.u, cfg.s_v, cfg.s_u, cfg.i, cfg.t);
    m.c = invert_cperm(cfg.c);
    m
}
