//! The greedy minimum-weight assembler: singleton fragments, sorted edge
//! consumption, geometric validation with inversion-aware motion, state
//! updates on merge, and termination at the target fragment count.

mod fragment;
mod render;

use std::collections::HashMap;
use std::fmt::Write as _;

pub use fragment::{fragment_from_places, BlockPlace, Cell, Fragment, Motion, DIR_DELTA};
pub use render::{compose_recovered_color, render};

use crate::compat::{placed_config, PuzzleKind, ScoreTensor};
use crate::error::{Error, Result};
use crate::imgcore::{compose_cperm, invert_cperm, opposite_side, BlockState};

/// One candidate abutment with its normalized score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub weight: f32,
    pub u: u32,
    pub s_u: u8,
    pub v: u32,
    /// Packed configuration column (side/inversion/NPT and channel order).
    pub k: u32,
}

/// Why an edge was not merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    SameFragment,
    SideOccupied,
    CapExceeded,
    Collision,
}

/// Outcome of attempting one merge.
pub enum MergeOutcome {
    Merged(Fragment),
    Rejected(Rejection),
}

/// Final (or partial) placement of every block.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub kind: PuzzleKind,
    /// Per block: fragment id, cell within the fragment frame, state.
    pub placements: Vec<(u32, Cell, BlockState)>,
    pub fragment_count: usize,
    /// False when the edge list ran out before reaching the target count.
    pub complete: bool,
    pub diagnostic: Option<String>,
}

impl Assembly {
    pub fn n(&self) -> usize {
        self.placements.len()
    }

    /// Blocks grouped per fragment id.
    pub fn fragments(&self) -> HashMap<u32, Vec<u32>> {
        let mut map: HashMap<u32, Vec<u32>> = HashMap::new();
        for (block, (frag, _, _)) in self.placements.iter().enumerate() {
            map.entry(*frag).or_default().push(block as u32);
        }
        map
    }

    /// Occupancy per fragment: cell -> block.
    pub fn occupancy(&self) -> HashMap<u32, HashMap<Cell, u32>> {
        let mut map: HashMap<u32, HashMap<Cell, u32>> = HashMap::new();
        for (block, (frag, cell, _)) in self.placements.iter().enumerate() {
            map.entry(*frag).or_default().insert(*cell, block as u32);
        }
        map
    }

    /// Line-oriented text form: `block_id cell_x cell_y r i t [c]`, with
    /// fragments shifted far apart so their cells never touch.
    pub fn to_text(&self) -> String {
        let mut min_x: HashMap<u32, (i32, i32)> = HashMap::new();
        for (frag, cell, _) in &self.placements {
            let e = min_x.entry(*frag).or_insert((i32::MAX, i32::MAX));
            e.0 = e.0.min(cell.0);
            e.1 = e.1.min(cell.1);
        }
        // Deterministic fragment order by id.
        let mut frags: Vec<u32> = min_x.keys().copied().collect();
        frags.sort_unstable();
        let offsets: HashMap<u32, i64> =
            frags.iter().enumerate().map(|(idx, &f)| (f, idx as i64 * 1_000_000)).collect();
        let mut out = String::new();
        for (block, (frag, cell, st)) in self.placements.iter().enumerate() {
            let base = min_x[frag];
            let x = (cell.0 - base.0) as i64 + offsets[frag];
            let y = (cell.1 - base.1) as i64;
            if self.kind == PuzzleKind::Etc {
                let _ = writeln!(
                    out,
                    "{} {} {} {} {} {} {}",
                    block, x, y, st.r, st.i as u8, st.t as u8, st.c
                );
            } else {
                let _ =
                    writeln!(out, "{} {} {} {} {} {}", block, x, y, st.r, st.i as u8, st.t as u8);
            }
        }
        out
    }

    pub fn from_text(text: &str, kind: PuzzleKind) -> Result<Self> {
        let mut rows: Vec<(usize, i64, i64, BlockState)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let want = if kind == PuzzleKind::Etc { 7 } else { 6 };
            if f.len() != want {
                return Err(Error::Format(format!("line {}: expected {want} fields", lineno + 1)));
            }
            let num = |s: &str| -> Result<i64> {
                s.parse().map_err(|_| Error::Format(format!("line {}: bad field", lineno + 1)))
            };
            let mut st = BlockState::new(num(f[3])? as u8, num(f[4])? != 0, num(f[5])? != 0);
            if kind == PuzzleKind::Etc {
                st = st.with_cperm(num(f[6])? as u8);
            }
            rows.push((num(f[0])? as usize, num(f[1])?, num(f[2])?, st));
        }
        rows.sort_by_key(|r| r.0);
        for (want, row) in rows.iter().enumerate() {
            if row.0 != want {
                return Err(Error::Format(format!("missing or duplicate block {want}")));
            }
        }
        // Fragment membership from the 1e6 x-offset bands.
        let placements = rows
            .into_iter()
            .map(|(_, x, y, st)| {
                let frag = (x.div_euclid(1_000_000)) as u32;
                (frag, ((x.rem_euclid(1_000_000)) as i32, y as i32), st)
            })
            .collect::<Vec<_>>();
        let fragment_count =
            placements.iter().map(|(f, _, _)| *f).collect::<std::collections::HashSet<_>>().len();
        Ok(Assembly {
            kind,
            placements,
            fragment_count,
            complete: true,
            diagnostic: None,
        })
    }
}

/// Try to merge two fragments along one edge, without mutating the inputs.
/// Geometry goes: rotate `fb` so the two sides face each other, mirror it if
/// the relative inversion parity disagrees with the edge, translate it next
/// to `u`, then reject on any cell collision.
pub fn merge_fragments(
    fa: &Fragment,
    fb: &Fragment,
    edge: &Edge,
    kind: PuzzleKind,
    cap: usize,
) -> MergeOutcome {
    if fa.len() + fb.len() > cap {
        return MergeOutcome::Rejected(Rejection::CapExceeded);
    }
    let pu = fa.place_of(edge.u).expect("edge.u must live in fa");
    let pv = fb.place_of(edge.v).expect("edge.v must live in fb");
    let (s_v, rel_i, rel_t, rel_c) = kind.unpack(edge.k as usize);

    // Both sides must still be open.
    let dir_u = pu.state.side_facing(edge.s_u);
    let next_u = (pu.cell.0 + DIR_DELTA[dir_u as usize].0, pu.cell.1 + DIR_DELTA[dir_u as usize].1);
    if fa.occupied(next_u).is_some() {
        return MergeOutcome::Rejected(Rejection::SideOccupied);
    }
    let dir_v = pv.state.side_facing(s_v);
    let next_v = (pv.cell.0 + DIR_DELTA[dir_v as usize].0, pv.cell.1 + DIR_DELTA[dir_v as usize].1);
    if fb.occupied(next_v).is_some() {
        return MergeOutcome::Rejected(Rejection::SideOccupied);
    }

    let motion = merge_motion(pu, pv, dir_u, dir_v, s_v, rel_i, rel_t, rel_c, kind);

    // Collision test before committing.
    let moved: Vec<BlockPlace> = fb.blocks.iter().map(|p| motion.apply(p)).collect();
    if moved.iter().any(|p| fa.occupied(p.cell).is_some()) {
        return MergeOutcome::Rejected(Rejection::Collision);
    }
    let mut merged = fa.clone();
    merged.absorb(moved);
    MergeOutcome::Merged(merged)
}

/// The rigid motion bringing `fb` against `fa` for one edge.
#[allow(clippy::too_many_arguments)]
fn merge_motion(
    pu: &BlockPlace,
    pv: &BlockPlace,
    dir_u: u8,
    dir_v: u8,
    _s_v: u8,
    rel_i: bool,
    rel_t: bool,
    rel_c: u8,
    kind: PuzzleKind,
) -> Motion {
    // Rotate fb so v's matched side faces back toward u.
    let rot = (opposite_side(dir_u) + 4 - dir_v) % 4;
    let v_cell_rot = Motion { rot, mirror: None, toggle_npt: false, cperm: 0, offset: (0, 0) }
        .apply_cell(pv.cell);

    // Mirror about the axis through v's cell parallel to the seam when the
    // inversion parity disagrees. This is the unique reflection keeping the
    // matched sides in contact.
    let mirror = if pu.state.i ^ pv.state.i != rel_i {
        let horizontal_contact = dir_u == 1 || dir_u == 3;
        Some((horizontal_contact, if horizontal_contact { v_cell_rot.1 } else { v_cell_rot.0 }))
    } else {
        None
    };

    let toggle_npt = pu.state.t ^ pv.state.t ^ rel_t;

    // Channel-order adjustment g with rel(c_u, g + c_v) = rel_c.
    let cperm = if kind == PuzzleKind::Etc {
        compose_cperm(compose_cperm(pu.state.c, rel_c), invert_cperm(pv.state.c))
    } else {
        0
    };

    let target = (
        pu.cell.0 + DIR_DELTA[dir_u as usize].0,
        pu.cell.1 + DIR_DELTA[dir_u as usize].1,
    );
    // Mirror fixes v's cell, so only rotation matters for the offset.
    let offset = (target.0 - v_cell_rot.0, target.1 - v_cell_rot.1);
    Motion { rot, mirror, toggle_npt, cperm, offset }
}

/// Majority vote over the seam pairs a merge would create: each pair backs
/// the channel-order adjustment its best-scoring relative order implies;
/// ties resolve to the lowest index. Pairs whose scores were not retained
/// by the tensor abstain.
pub fn vote_color(pairs: &[(BlockPlace, BlockPlace, u8)], tensor: &ScoreTensor) -> u8 {
    let mut votes = [0usize; 6];
    for (pa, pb, dir) in pairs {
        let cfg0 = placed_config(pa.block as usize, pa.state, pb.block as usize, pb.state, *dir);
        let mut best: Option<(f32, u8)> = None;
        for c in 0..6u8 {
            let k = PuzzleKind::Etc.pack(cfg0.s_v, cfg0.i, cfg0.t, c);
            if let Some(w) = tensor.get(pa.block as usize, cfg0.s_u, pb.block as usize, k) {
                if best.map_or(true, |(bw, _)| w < bw) {
                    best = Some((w, c));
                }
            }
        }
        if let Some((_, c_pref)) = best {
            // The adjustment g that realises c_pref for this pair given the
            // states already accumulated (pb's state lacks the pending g).
            let g = compose_cperm(
                compose_cperm(pa.state.c, c_pref),
                invert_cperm(pb.state.c),
            );
            votes[g as usize] += 1;
        }
    }
    let max = votes.iter().max().copied().unwrap_or(0);
    votes.iter().position(|&v| v == max).unwrap_or(0) as u8
}

/// Solver tuning.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Edge candidates drawn per (block, side) slice.
    pub candidates_per_row: usize,
    /// Use seam majority voting for the channel order on color merges.
    pub color_voting: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { candidates_per_row: 64, color_voting: true }
    }
}

/// Assemble the puzzle greedily from the score tensor. `fragment_cap`
/// bounds fragment size (n/3 for the flattened scheme, where the terminal
/// state is exactly three fragments; n otherwise, terminating at one).
pub fn solve(tensor: &ScoreTensor, fragment_cap: usize) -> Assembly {
    solve_with_options(tensor, fragment_cap, SolveOptions::default())
}

pub fn solve_with_options(
    tensor: &ScoreTensor,
    fragment_cap: usize,
    options: SolveOptions,
) -> Assembly {
    let n = tensor.n();
    let kind = tensor.kind();
    let target_fragments = if fragment_cap < n { 3 } else { 1 };

    let mut edges = tensor.candidates(options.candidates_per_row);
    edges.sort_by(|a, b| {
        a.0.total_cmp(&b.0).then_with(|| (a.1, a.2, a.3, a.4).cmp(&(b.1, b.2, b.3, b.4)))
    });

    // Union-find over blocks; fragment payload lives at the root.
    let mut parent: Vec<u32> = (0..n as u32).collect();
    let mut frags: Vec<Option<Fragment>> =
        (0..n as u32).map(|b| Some(Fragment::singleton(b))).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }

    let mut fragment_count = n;
    let mut last_weight = f32::NEG_INFINITY;
    for &(weight, u, s_u, v, k) in &edges {
        if fragment_count <= target_fragments {
            break;
        }
        debug_assert!(weight >= last_weight);
        last_weight = weight;

        let ru = find(&mut parent, u);
        let rv = find(&mut parent, v);
        if ru == rv {
            continue;
        }
        let edge = Edge { weight, u, s_u, v, k };

        // For the color scheme, re-aim the channel adjustment by majority
        // vote across every seam the merge would create.
        let voted_edge = if kind == PuzzleKind::Etc && options.color_voting {
            let (fa, fb) = (frags[ru as usize].as_ref().unwrap(), frags[rv as usize].as_ref().unwrap());
            match prepare_vote(fa, fb, &edge, kind, fragment_cap, tensor) {
                Some(k_voted) => Edge { k: k_voted, ..edge },
                None => edge,
            }
        } else {
            edge
        };

        let fa = frags[ru as usize].take().unwrap();
        let fb = frags[rv as usize].take().unwrap();
        match merge_fragments(&fa, &fb, &voted_edge, kind, fragment_cap) {
            MergeOutcome::Merged(merged) => {
                frags[ru as usize] = Some(merged);
                frags[rv as usize] = None;
                parent[rv as usize] = ru;
                fragment_count -= 1;
            }
            MergeOutcome::Rejected(_) => {
                frags[ru as usize] = Some(fa);
                frags[rv as usize] = Some(fb);
            }
        }
    }

    let complete = fragment_count <= target_fragments;
    let mut placements = vec![(0u32, (0i32, 0i32), BlockState::identity()); n];
    for b in 0..n as u32 {
        let root = find(&mut parent, b);
        let frag = frags[root as usize].as_ref().expect("root holds fragment");
        let place = frag.place_of(b).expect("every block is placed");
        placements[b as usize] = (root, place.cell, place.state);
    }
    Assembly {
        kind,
        placements,
        fragment_count,
        complete,
        diagnostic: (!complete).then(|| {
            format!(
                "edge list exhausted with {fragment_count} fragments (target {target_fragments})"
            )
        }),
    }
}

/// Run the geometric part of a merge far enough to enumerate the seam pairs
/// it would create, and return the edge configuration with the voted
/// channel order. `None` leaves the edge untouched (geometry rejected; the
/// real merge will report why).
fn prepare_vote(
    fa: &Fragment,
    fb: &Fragment,
    edge: &Edge,
    kind: PuzzleKind,
    cap: usize,
    tensor: &ScoreTensor,
) -> Option<u32> {
    if fa.len() + fb.len() > cap {
        return None;
    }
    let pu = fa.place_of(edge.u)?;
    let pv = fb.place_of(edge.v)?;
    let (s_v, rel_i, rel_t, rel_c) = kind.unpack(edge.k as usize);
    let dir_u = pu.state.side_facing(edge.s_u);
    let dir_v = pv.state.side_facing(s_v);
    let motion = merge_motion(pu, pv, dir_u, dir_v, s_v, rel_i, rel_t, rel_c, kind);
    let moved: Vec<BlockPlace> = fb.blocks.iter().map(|p| motion.apply(p)).collect();

    let mut pairs = Vec::new();
    for p in &moved {
        for dir in 0..4u8 {
            let next =
                (p.cell.0 + DIR_DELTA[dir as usize].0, p.cell.1 + DIR_DELTA[dir as usize].1);
            if let Some(a_block) = fa.occupied(next) {
                let pa = fa.place_of(a_block).unwrap();
                // Pair direction runs from the settled fragment into the
                // moving one.
                pairs.push((*pa, *p, opposite_side(dir)));
            }
        }
    }
    if pairs.is_empty() {
        return None;
    }
    // The motion already composed an adjustment from the edge's own c; vote
    // relative to the PRE-adjust states, then translate back into an edge
    // configuration: rel_c' with g_voted = c_u * rel_c' * inv(c_v).
    let pre_vote_pairs: Vec<(BlockPlace, BlockPlace, u8)> = pairs
        .iter()
        .map(|&(pa, pb, dir)| {
            let mut undone = pb;
            undone.state.c = compose_cperm(invert_cperm(motion.cperm), pb.state.c);
            (pa, undone, dir)
        })
        .collect();
    let g = vote_color(&pre_vote_pairs, tensor);
    let pv_c = pv.state.c;
    let pu_c = pu.state.c;
    let rel_voted = compose_cperm(compose_cperm(invert_cperm(pu_c), g), pv_c);
    Some(PuzzleKind::Etc.pack(s_v, rel_i, rel_t, rel_voted) as u32)
}
