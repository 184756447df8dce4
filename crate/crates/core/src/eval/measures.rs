//! Assembly quality measures against the ground-truth equivalent key:
//! neighbor comparison and largest component, plus pixel-level helpers.

use std::collections::HashMap;

use crate::cipher::WMap;
use crate::compat::{mirror_config, placed_config, true_adjacencies, PuzzleKind};
use crate::imgcore::{BlockGrid, BlockState, PlanarImage};
use crate::solver::{Assembly, Cell, DIR_DELTA};

/// What counts as a correctly assembled pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correctness {
    /// Relative placement and full relative state must match the truth;
    /// `include_color` additionally checks the channel order (off by
    /// default for the color scheme, mirroring how its results are
    /// reported).
    FullState { include_color: bool },
    /// Only adjacency of the right blocks, any orientation.
    PlacementOnly,
}

impl Correctness {
    pub fn standard(kind: PuzzleKind) -> Self {
        let _ = kind;
        Correctness::FullState { include_color: false }
    }

    pub fn strict(kind: PuzzleKind) -> Self {
        Correctness::FullState { include_color: kind == PuzzleKind::Etc }
    }
}

/// Channel groups of the standard layouts: 3 for the flattened scheme
/// (three independent per-channel puzzles), 1 for whole-image puzzles.
pub fn channel_groups(kind: PuzzleKind) -> usize {
    match kind {
        PuzzleKind::Etc => 1,
        _ => 3,
    }
}

/// True-pair lookup: unordered cipher-block pair -> expected configuration
/// (stored from the lower block's perspective).
fn truth_pairs(
    truth: &WMap,
    grid: &BlockGrid,
    groups: usize,
) -> HashMap<(u32, u32), crate::imgcore::MatchConfig> {
    let mut map = HashMap::new();
    for (cfg, _) in true_adjacencies(truth, grid, groups) {
        let key = (cfg.u.min(cfg.v) as u32, (cfg.u.max(cfg.v)) as u32);
        let stored = if cfg.u <= cfg.v { cfg } else { mirror_config(&cfg) };
        map.insert(key, stored);
    }
    map
}

fn pair_correct(
    mode: Correctness,
    truth_cfg: &crate::imgcore::MatchConfig,
    a: u32,
    state_a: BlockState,
    b: u32,
    state_b: BlockState,
    dir: u8,
) -> bool {
    match mode {
        Correctness::PlacementOnly => true,
        Correctness::FullState { include_color } => {
            let realized = placed_config(a as usize, state_a, b as usize, state_b, dir);
            let expected = if truth_cfg.u == a as usize {
                *truth_cfg
            } else {
                mirror_config(truth_cfg)
            };
            realized.s_u == expected.s_u
                && realized.s_v == expected.s_v
                && realized.i == expected.i
                && realized.t == expected.t
                && (!include_color || realized.c == expected.c)
        }
    }
}

/// Walk every adjacent pair inside each fragment once (right and down),
/// reporting whether the pair is truly adjacent and correctly configured.
fn assembled_pairs(
    assembly: &Assembly,
    truth: &WMap,
    grid: &BlockGrid,
    groups: usize,
    mode: Correctness,
) -> (usize, Vec<(u32, u32, bool)>) {
    let lookup = truth_pairs(truth, grid, groups);
    let occupancy = assembly.occupancy();
    let mut edges = Vec::new();
    let mut correct = 0usize;
    for (frag, cells) in &occupancy {
        for (&cell, &a) in cells {
            for dir in [1u8, 2u8] {
                let next: Cell =
                    (cell.0 + DIR_DELTA[dir as usize].0, cell.1 + DIR_DELTA[dir as usize].1);
                let Some(&b) = cells.get(&next) else { continue };
                let (fa, _, sa) = assembly.placements[a as usize];
                let (_, _, sb) = assembly.placements[b as usize];
                debug_assert_eq!(fa, *frag);
                let key = (a.min(b), a.max(b));
                let ok = match lookup.get(&key) {
                    Some(truth_cfg) => pair_correct(mode, truth_cfg, a, sa, b, sb, dir),
                    None => false,
                };
                if ok {
                    correct += 1;
                }
                edges.push((a, b, ok));
            }
        }
    }
    (correct, edges)
}

/// Ratio of correctly assembled adjacent pairs to the total number of true
/// adjacent pairs of the layout. Relative placement and state make a pair
/// correct, so the measure is invariant under each fragment's global pose.
pub fn neighbor_comparison(
    assembly: &Assembly,
    truth: &WMap,
    grid: &BlockGrid,
    groups: usize,
    mode: Correctness,
) -> f64 {
    let x = grid.x / groups;
    let y = grid.y;
    let denominator = (groups * (2 * x * y - x - y)) as f64;
    let (correct, _) = assembled_pairs(assembly, truth, grid, groups, mode);
    correct as f64 / denominator
}

/// Size of the largest internally-correct connected component, relative to
/// one layout group (n/3 blocks for the flattened scheme, n otherwise).
pub fn largest_component(
    assembly: &Assembly,
    truth: &WMap,
    grid: &BlockGrid,
    groups: usize,
    mode: Correctness,
) -> f64 {
    let n = assembly.n();
    let (_, edges) = assembled_pairs(assembly, truth, grid, groups, mode);
    // Union-find over correct edges only.
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    for (a, b, ok) in edges {
        if ok {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra as usize] = rb;
            }
        }
    }
    let mut sizes: HashMap<u32, usize> = HashMap::new();
    for b in 0..n as u32 {
        *sizes.entry(find(&mut parent, b)).or_insert(0) += 1;
    }
    let largest = sizes.values().max().copied().unwrap_or(0);
    largest as f64 / (n / groups) as f64
}

/// Peak signal-to-noise ratio in dB between two same-shape images.
pub fn psnr(a: &PlanarImage, b: &PlanarImage) -> f64 {
    let mse: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum::<f64>()
        / a.samples().len() as f64;
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0f64 * 255.0 / mse).log10()
    }
}

/// Pearson correlation between two images' samples.
pub fn pixel_correlation(a: &PlanarImage, b: &PlanarImage) -> f64 {
    let n = a.samples().len().min(b.samples().len()) as f64;
    let ma = a.samples().iter().map(|&v| v as f64).sum::<f64>() / n;
    let mb = b.samples().iter().map(|&v| v as f64).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.samples().iter().zip(b.samples()) {
        let dx = x as f64 - ma;
        let dy = y as f64 - mb;
        cov += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

/// The assembly that simply reproduces the truth, for fixtures and tests.
pub fn truth_assembly(truth: &WMap, grid: &BlockGrid, kind: PuzzleKind, groups: usize) -> Assembly {
    let group_x = grid.x / groups;
    let inv = truth.position_to_plain();
    let mut placements = vec![(0u32, (0i32, 0i32), BlockState::identity()); truth.len()];
    for position in 0..truth.len() {
        let plain = inv[position];
        let (px, py) = grid.cell_of(plain);
        let frag = (px / group_x) as u32;
        let entry = truth.entry(plain);
        // The cipher block at `position` renders back to the plaintext via
        // the inverse of the state the cipher applied.
        let state = BlockState::from_variant_index(entry.k).with_cperm(entry.c).inverse();
        placements[position] = (frag, ((px % group_x) as i32, py as i32), state);
    }
    Assembly {
        kind,
        placements,
        fragment_count: groups,
        complete: true,
        diagnostic: None,
    }
}
