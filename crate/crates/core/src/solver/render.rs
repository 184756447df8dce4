//! Turn an assembly back into viewable planes: apply each block's placement
//! state and paste it at its assembled cell, one plane per fragment.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::imgcore::{transform_block, Block, PlanarImage};
use crate::solver::Assembly;

/// Rendered planes sorted by block count, largest fragment first; unfilled
/// cells of non-rectangular fragments stay black.
pub fn render(assembly: &Assembly, blocks: &[Block]) -> Result<Vec<PlanarImage>> {
    if blocks.len() != assembly.n() {
        return Err(Error::invalid("block count does not match assembly"));
    }
    let bs = blocks.first().map(|b| b.width()).unwrap_or(0);
    let channels = blocks.first().map(|b| b.channels()).unwrap_or(1);
    let mut by_fragment: HashMap<u32, Vec<usize>> = HashMap::new();
    for (block, (frag, _, _)) in assembly.placements.iter().enumerate() {
        by_fragment.entry(*frag).or_default().push(block);
    }
    let mut fragments: Vec<(u32, Vec<usize>)> = by_fragment.into_iter().collect();
    fragments.sort_by_key(|(id, members)| (std::cmp::Reverse(members.len()), *id));

    let mut planes = Vec::with_capacity(fragments.len());
    for (_, members) in fragments {
        let cells: Vec<(i32, i32)> =
            members.iter().map(|&b| assembly.placements[b].1).collect();
        let min_x = cells.iter().map(|c| c.0).min().unwrap();
        let min_y = cells.iter().map(|c| c.1).min().unwrap();
        let max_x = cells.iter().map(|c| c.0).max().unwrap();
        let max_y = cells.iter().map(|c| c.1).max().unwrap();
        let w = (max_x - min_x + 1) as usize * bs;
        let h = (max_y - min_y + 1) as usize * bs;
        let mut plane = PlanarImage::zeroed(w, h, channels)?;
        for &b in &members {
            let (_, cell, state) = assembly.placements[b];
            let tile = transform_block(&blocks[b], state)?;
            let x0 = (cell.0 - min_x) as usize * bs;
            let y0 = (cell.1 - min_y) as usize * bs;
            for ch in 0..channels {
                for row in 0..bs {
                    for col in 0..bs {
                        plane.set(x0 + col, y0 + row, ch, tile.get(col, row, ch));
                    }
                }
            }
        }
        planes.push(plane);
    }
    Ok(planes)
}

/// Heuristic color composite from three recovered planes: the two planes
/// whose means sit nearest 128 with the lowest variance act as chroma, and
/// the chroma ordering with the more colorful result wins. Cosmetic only;
/// the grayscale planes stay the primary output.
pub fn compose_recovered_color(planes: &[PlanarImage]) -> Option<PlanarImage> {
    if planes.len() != 3 {
        return None;
    }
    let (w, h) = (planes[0].width(), planes[0].height());
    if planes.iter().any(|p| p.width() != w || p.height() != h || p.channels() != 1) {
        return None;
    }
    let stats: Vec<(f64, f64)> = planes
        .iter()
        .map(|p| {
            let n = (w * h) as f64;
            let mean = p.samples().iter().map(|&v| v as f64).sum::<f64>() / n;
            let var =
                p.samples().iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / n;
            (mean, var)
        })
        .collect();
    // Chroma candidates: closeness to the 128 offset dominates, variance
    // breaks ties.
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let ka = ((stats[a].0 - 128.0).abs(), stats[a].1);
        let kb = ((stats[b].0 - 128.0).abs(), stats[b].1);
        ka.partial_cmp(&kb).unwrap()
    });
    let luma = order[2];
    let (ca, cb) = (order[0], order[1]);
    let build = |cb_idx: usize, cr_idx: usize| -> Option<PlanarImage> {
        let mut samples = Vec::with_capacity(3 * w * h);
        samples.extend_from_slice(planes[luma].samples());
        samples.extend_from_slice(planes[cb_idx].samples());
        samples.extend_from_slice(planes[cr_idx].samples());
        let ycbcr = PlanarImage::new(w, h, 3, samples).ok()?;
        crate::imgcore::ycbcr_to_rgb(&ycbcr).ok()
    };
    let colorfulness = |img: &PlanarImage| -> f64 {
        // Mean absolute opponent-channel signal.
        let len = w * h;
        let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
        (0..len)
            .map(|i| {
                let rg = (r[i] as f64 - g[i] as f64).abs();
                let yb = ((r[i] as f64 + g[i] as f64) / 2.0 - b[i] as f64).abs();
                rg + yb
            })
            .sum::<f64>()
            / len as f64
    };
    let first = build(ca, cb)?;
    let second = build(cb, ca)?;
    Some(if colorfulness(&first) >= colorfulness(&second) { first } else { second })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compat::PuzzleKind;
    use crate::imgcore::BlockState;

    #[test]
    fn render_places_blocks_at_cells() {
        let blocks = vec![
            Block::new(2, 2, 1, vec![1, 1, 1, 1]).unwrap(),
            Block::new(2, 2, 1, vec![9, 9, 9, 9]).unwrap(),
        ];
        let assembly = Assembly {
            kind: PuzzleKind::Type1,
            placements: vec![
                (0, (0, 0), BlockState::identity()),
                (0, (1, 0), BlockState::identity()),
            ],
            fragment_count: 1,
            complete: true,
            diagnostic: None,
        };
        let planes = render(&assembly, &blocks).unwrap();
        assert_eq!(planes.len(), 1);
        let p = &planes[0];
        assert_eq!((p.width(), p.height()), (4, 2));
        assert_eq!(p.get(0, 0, 0), 1);
        assert_eq!(p.get(2, 0, 0), 9);
    }

    #[test]
    fn render_applies_states() {
        let blocks = vec![Block::new(2, 2, 1, vec![10, 20, 30, 40]).unwrap()];
        let assembly = Assembly {
            kind: PuzzleKind::Type1,
            placements: vec![(0, (0, 0), BlockState::new(0, false, true))],
            fragment_count: 1,
            complete: true,
            diagnostic: None,
        };
        let planes = render(&assembly, &blocks).unwrap();
        assert_eq!(planes[0].get(0, 0, 0), 245);
    }
}
