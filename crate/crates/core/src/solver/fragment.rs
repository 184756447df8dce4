//! Fragments: partially assembled, collision-free, 4-connected sets of
//! placed blocks on an unbounded integer lattice, each block carrying its
//! accumulated placement state.

use std::collections::HashMap;

use crate::imgcore::{compose_cperm, compose_dihedral, BlockState};

pub type Cell = (i32, i32);

/// Unit step toward a side direction (y grows downward).
pub const DIR_DELTA: [Cell; 4] = [(0, -1), (1, 0), (0, 1), (-1, 0)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockPlace {
    pub block: u32,
    pub cell: Cell,
    pub state: BlockState,
}

/// One fragment; cells are only meaningful relative to each other.
#[derive(Debug, Clone, Default)]
pub struct Fragment {
    pub blocks: Vec<BlockPlace>,
    occupancy: HashMap<Cell, u32>,
}

impl Fragment {
    pub fn singleton(block: u32) -> Self {
        let mut occupancy = HashMap::new();
        occupancy.insert((0, 0), block);
        Fragment {
            blocks: vec![BlockPlace { block, cell: (0, 0), state: BlockState::identity() }],
            occupancy,
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn occupied(&self, cell: Cell) -> Option<u32> {
        self.occupancy.get(&cell).copied()
    }

    pub fn place_of(&self, block: u32) -> Option<&BlockPlace> {
        self.blocks.iter().find(|p| p.block == block)
    }

    /// True when every pair of cells is reachable through shared edges.
    pub fn is_connected(&self) -> bool {
        if self.blocks.is_empty() {
            return true;
        }
        let mut seen = HashMap::new();
        let mut stack = vec![self.blocks[0].cell];
        seen.insert(self.blocks[0].cell, ());
        while let Some(cell) = stack.pop() {
            for delta in DIR_DELTA {
                let next = (cell.0 + delta.0, cell.1 + delta.1);
                if self.occupancy.contains_key(&next) && seen.insert(next, ()).is_none() {
                    stack.push(next);
                }
            }
        }
        seen.len() == self.blocks.len()
    }

    fn rebuild_occupancy(&mut self) {
        self.occupancy.clear();
        for p in &self.blocks {
            let prev = self.occupancy.insert(p.cell, p.block);
            debug_assert!(prev.is_none(), "two blocks share cell {:?}", p.cell);
        }
    }

    /// Absorb `other`'s blocks (already transformed into this fragment's
    /// frame) after the caller verified there are no collisions.
    pub fn absorb(&mut self, other: Vec<BlockPlace>) {
        for p in other {
            let prev = self.occupancy.insert(p.cell, p.block);
            debug_assert!(prev.is_none());
            self.blocks.push(p);
        }
    }
}

/// A rigid motion of a fragment: optional quarter-turns, optional mirror
/// about an axis through a fixed cell, per-block NPT toggle, channel-order
/// adjustment, and a final translation.
#[derive(Debug, Clone, Copy)]
pub struct Motion {
    /// Clockwise quarter turns about the origin.
    pub rot: u8,
    /// Mirror after rotation: None, or Some((axis_is_horizontal, pivot)).
    /// A horizontal axis flips cells upside down; a vertical axis flips
    /// them left-right. The pivot coordinate stays fixed.
    pub mirror: Option<(bool, i32)>,
    pub toggle_npt: bool,
    /// Channel-order prefix applied to every block state.
    pub cperm: u8,
    pub offset: Cell,
}

impl Motion {
    pub fn apply_cell(&self, cell: Cell) -> Cell {
        let mut c = match self.rot % 4 {
            0 => cell,
            1 => (-cell.1, cell.0),
            2 => (-cell.0, -cell.1),
            _ => (cell.1, -cell.0),
        };
        if let Some((horizontal_axis, pivot)) = self.mirror {
            if horizontal_axis {
                c = (c.0, 2 * pivot - c.1);
            } else {
                c = (2 * pivot - c.0, c.1);
            }
        }
        (c.0 + self.offset.0, c.1 + self.offset.1)
    }

    pub fn apply_state(&self, state: BlockState) -> BlockState {
        let (mut r, mut i) = compose_dihedral((self.rot % 4, false), (state.r, state.i));
        if let Some((horizontal_axis, _)) = self.mirror {
            // An upside-down flip is mirror-after-rot180; a left-right
            // flip is the plain mirror.
            let prefix = if horizontal_axis { (2, true) } else { (0, true) };
            let (nr, ni) = compose_dihedral(prefix, (r, i));
            r = nr;
            i = ni;
        }
        BlockState {
            r,
            i,
            t: state.t ^ self.toggle_npt,
            c: compose_cperm(self.cperm, state.c),
        }
    }

    pub fn apply(&self, place: &BlockPlace) -> BlockPlace {
        BlockPlace {
            block: place.block,
            cell: self.apply_cell(place.cell),
            state: self.apply_state(place.state),
        }
    }
}

/// Rebuild helper for deserialized fragments.
pub fn fragment_from_places(blocks: Vec<BlockPlace>) -> Fragment {
    let mut f = Fragment { blocks, occupancy: HashMap::new() };
    f.rebuild_occupancy();
    f
}
