//! The per-(block, side) score tensor over all candidate (block,
//! configuration) pairs, built image-by-image and reduced in row tiles.
//!
//! Every metric here decomposes into `const_row + const_col + <F_row,
//! F_col>` where the feature vectors carry the boundary columns and
//! per-image gradient statistics of each side. That turns the full
//! n x 4 x n x K sweep into a tiled matrix product, which is what makes
//! desk-scale runs feasible; the tensor itself is a contract, not a layout.

use rayon::prelude::*;

use crate::compat::seam::VAR_EPSILON;
use crate::compat::{canonical_b_state, Metric, PuzzleKind};
use crate::error::{Error, Result};
use crate::imgcore::{split_blocks, transform_block, Block, BlockGrid, BlockState, MatchConfig, PlanarImage};

/// Tuning knobs for `score_all`. The defaults keep small puzzles dense and
/// spill big ones to a per-row top-k representation.
#[derive(Debug, Clone, Copy)]
pub struct TensorOptions {
    /// Candidates kept per (block, side) slice in the top-k representation.
    pub top_k: usize,
    /// Dense storage is used while n*4*n*K*4 bytes stays below this.
    pub dense_limit_bytes: usize,
    /// Rows per matrix-product tile.
    pub tile_rows: usize,
}

impl Default for TensorOptions {
    fn default() -> Self {
        TensorOptions { top_k: 64, dense_limit_bytes: 256 << 20, tile_rows: 64 }
    }
}

enum Storage {
    Dense(Vec<f32>),
    TopK {
        top_k: usize,
        /// Per row: `top_k` (weight, v, k) triples sorted ascending, padded
        /// with infinite weight. The first entry is the row argmin.
        entries: Vec<(f32, u32, u32)>,
    },
}

/// Normalized compatibility scores for each (block, side) against all
/// candidate (block, configuration) pairs. Same-block entries are excluded
/// by an infinite sentinel.
pub struct ScoreTensor {
    n: usize,
    kind: PuzzleKind,
    block_size: usize,
    normalized: bool,
    storage: Storage,
}

/// The best (partner, configuration) per (block, side); ties resolved
/// toward the lowest (partner, configuration) index.
pub struct MatchRanking {
    pub best: Vec<(u32, u32)>,
}

impl ScoreTensor {
    /// Build a tensor from explicit values laid out as [n][4][n][K];
    /// same-block entries are forced to the infinite sentinel. Oracle
    /// tensors in tests and fixtures enter through here.
    pub fn from_dense(
        n: usize,
        kind: PuzzleKind,
        block_size: usize,
        mut data: Vec<f32>,
        normalized: bool,
    ) -> Result<Self> {
        let kc = kind.config_count();
        if data.len() != n * 4 * n * kc {
            return Err(Error::invalid("dense tensor has wrong length"));
        }
        for u in 0..n {
            for s in 0..4 {
                let row = (u * 4 + s) * n * kc;
                for k in 0..kc {
                    data[row + u * kc + k] = f32::INFINITY;
                }
            }
        }
        Ok(ScoreTensor { n, kind, block_size, normalized, storage: Storage::Dense(data) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> PuzzleKind {
        self.kind
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn config_count(&self) -> usize {
        self.kind.config_count()
    }

    fn row_index(&self, u: usize, s_u: u8) -> usize {
        u * 4 + s_u as usize
    }

    /// Normalized score of one entry; `None` when the entry is the
    /// same-block sentinel or was not retained by the top-k representation.
    pub fn get(&self, u: usize, s_u: u8, v: usize, k: usize) -> Option<f32> {
        if u == v {
            return None;
        }
        let row = self.row_index(u, s_u);
        match &self.storage {
            Storage::Dense(data) => {
                let kc = self.kind.config_count();
                let val = data[row * self.n * kc + v * kc + k];
                val.is_finite().then_some(val)
            }
            Storage::TopK { top_k, entries, .. } => entries
                [row * top_k..(row + 1) * top_k]
                .iter()
                .find(|&&(_, ev, ek)| ev as usize == v && ek as usize == k)
                .map(|&(w, _, _)| w),
        }
    }

    /// Best (partner, configuration) of a (block, side) slice.
    pub fn row_argmin(&self, u: usize, s_u: u8) -> (usize, usize) {
        let row = self.row_index(u, s_u);
        match &self.storage {
            Storage::Dense(data) => {
                let kc = self.kind.config_count();
                let slice = &data[row * self.n * kc..(row + 1) * self.n * kc];
                let mut best = (f32::INFINITY, 0usize);
                for (idx, &w) in slice.iter().enumerate() {
                    if w < best.0 {
                        best = (w, idx);
                    }
                }
                (best.1 / kc, best.1 % kc)
            }
            Storage::TopK { top_k, entries, .. } => {
                let (_, v, k) = entries[row * top_k];
                (v as usize, k as usize)
            }
        }
    }

    pub fn ranking(&self) -> MatchRanking {
        let best = (0..self.n * 4)
            .map(|row| {
                let (v, k) = self.row_argmin(row / 4, (row % 4) as u8);
                (v as u32, k as u32)
            })
            .collect();
        MatchRanking { best }
    }

    /// Up to `per_row` best candidates of every (block, side), as
    /// (weight, u, s_u, v, k) tuples. The caller sorts them globally.
    pub fn candidates(&self, per_row: usize) -> Vec<(f32, u32, u8, u32, u32)> {
        let kc = self.kind.config_count();
        let mut out = Vec::with_capacity(self.n * 4 * per_row.min(16));
        for u in 0..self.n {
            for s_u in 0..4u8 {
                let row = self.row_index(u, s_u);
                match &self.storage {
                    Storage::Dense(data) => {
                        let slice = &data[row * self.n * kc..(row + 1) * self.n * kc];
                        let mut keep: Vec<(f32, u32, u32)> = Vec::with_capacity(per_row + 1);
                        for (idx, &w) in slice.iter().enumerate() {
                            if !w.is_finite() {
                                continue;
                            }
                            let cand = (w, (idx / kc) as u32, (idx % kc) as u32);
                            insert_bounded(&mut keep, cand, per_row);
                        }
                        out.extend(keep.into_iter().map(|(w, v, k)| (w, u as u32, s_u, v, k)));
                    }
                    Storage::TopK { top_k, entries, .. } => {
                        out.extend(
                            entries[row * top_k..(row + 1) * top_k]
                                .iter()
                                .take(per_row)
                                .filter(|(w, _, _)| w.is_finite())
                                .map(|&(w, v, k)| (w, u as u32, s_u, v, k)),
                        );
                    }
                }
            }
        }
        out
    }
}

fn insert_bounded(keep: &mut Vec<(f32, u32, u32)>, cand: (f32, u32, u32), cap: usize) {
    if cap == 0 {
        return;
    }
    let worse = |a: &(f32, u32, u32), b: &(f32, u32, u32)| {
        (a.0, a.1, a.2) > (b.0, b.1, b.2)
    };
    if keep.len() == cap && worse(&cand, keep.last().unwrap()) {
        return;
    }
    let pos = keep.partition_point(|e| !worse(e, &cand));
    keep.insert(pos, cand);
    keep.truncate(cap);
}

/// Boundary feature vectors of one image: row side (left role, 4 rotations)
/// and column side (right role, 16 geometric variants), per channel.
struct SideColumns {
    /// edge/inner columns, `[block][variant][channel] -> (edge, inner)`.
    rows: Vec<Vec<Vec<(Vec<f64>, Vec<f64>)>>>,
    cols: Vec<Vec<Vec<(Vec<f64>, Vec<f64>)>>>,
}

fn extract_columns(blocks: &[Block], kind: PuzzleKind) -> Result<SideColumns> {
    let geo_variants = match kind {
        PuzzleKind::Type0 => 4,
        _ => 16,
    };
    let mut rows = Vec::with_capacity(blocks.len());
    let mut cols = Vec::with_capacity(blocks.len());
    for b in blocks {
        let (w, h) = (b.width(), b.height());
        let take = |blk: &Block, x: usize, ch: usize| -> Vec<f64> {
            let plane = blk.plane(ch);
            (0..h).map(|y| plane[y * w + x] as f64).collect()
        };
        let mut row_variants = Vec::with_capacity(4);
        for s_u in 0..4u8 {
            let rot = (1 + 4 - s_u) % 4;
            let canon = transform_block(b, BlockState::new(rot, false, false))?;
            let per_ch = (0..b.channels())
                .map(|ch| (take(&canon, w - 1, ch), take(&canon, w - 2, ch)))
                .collect();
            row_variants.push(per_ch);
        }
        rows.push(row_variants);
        let mut col_variants = Vec::with_capacity(geo_variants);
        for k in 0..geo_variants {
            let (s_v, i, t, _) = PuzzleKind::Type1.unpack(if geo_variants == 4 {
                k * 4 // Type0 columns are pure rotations: i = t = 0
            } else {
                k
            });
            let cfg = MatchConfig::new(0, 1, 0, s_v, i, t);
            let canon = transform_block(b, canonical_b_state(&cfg))?;
            let per_ch = (0..b.channels())
                .map(|ch| (take(&canon, 0, ch), take(&canon, 1, ch)))
                .collect();
            col_variants.push(per_ch);
        }
        cols.push(col_variants);
    }
    Ok(SideColumns { rows, cols })
}

/// Per-side statistics feeding the factored metric formulas.
struct SideStats {
    edge: Vec<f64>,
    qedge: Vec<f64>,
    sum_e: f64,
    sum_e2: f64,
    w: f64,
    mu: f64,
    sum_q: f64,
    sum_q2: f64,
    wp: f64,
    mup: f64,
    self_term: f64,
    self_term_par: f64,
}

fn side_stats(edge: &[f64], inner: &[f64]) -> SideStats {
    let p = edge.len() as f64;
    let grads: Vec<f64> = edge.iter().zip(inner).map(|(&e, &i)| e - i).collect();
    let mean = grads.iter().sum::<f64>() / p;
    let var = grads.iter().map(|&g| (g - mean) * (g - mean)).sum::<f64>() / p;
    let w = 1.0 / (var + VAR_EPSILON);
    let sum_e: f64 = edge.iter().sum();
    let sum_e2: f64 = edge.iter().map(|&e| e * e).sum();
    let self_term = (sum_e2 + 2.0 * mean * sum_e + p * mean * mean) * w;

    let qedge: Vec<f64> = edge.windows(2).map(|v| v[1] - v[0]).collect();
    let qinner: Vec<f64> = inner.windows(2).map(|v| v[1] - v[0]).collect();
    let h: Vec<f64> = qedge.iter().zip(&qinner).map(|(&e, &i)| e - i).collect();
    let pq = h.len() as f64;
    let mup = h.iter().sum::<f64>() / pq;
    let varp = h.iter().map(|&x| (x - mup) * (x - mup)).sum::<f64>() / pq;
    let wp = 1.0 / (varp + VAR_EPSILON);
    let sum_q: f64 = qedge.iter().sum();
    let sum_q2: f64 = qedge.iter().map(|&q| q * q).sum();
    let self_term_par = (sum_q2 + 2.0 * mup * sum_q + pq * mup * mup) * wp;

    SideStats {
        edge: edge.to_vec(),
        qedge,
        sum_e,
        sum_e2,
        w,
        mu: mean,
        sum_q,
        sum_q2,
        wp,
        mup,
        self_term,
        self_term_par,
    }
}

/// Feature dimension per channel for a metric over `m` images of boundary
/// length `p` (includes the two constant slots).
fn feature_dim(metric: Metric, p: usize, m: usize) -> usize {
    match metric {
        Metric::Ssd => p * m + 2,
        Metric::Mgc => (2 * p + 4) * m + 2,
        Metric::Emgc => (2 * p + 4) * m + (2 * (p - 1) + 4) * m + 2,
    }
}

/// Write one image's contribution to a row-side feature vector. `scale`
/// folds the 1/M averaging into the row side.
fn fill_row_features(metric: Metric, st: &SideStats, scale: f64, out: &mut [f64], cursor: &mut usize, const_acc: &mut f64) {
    let mut push = |vals: &[f64]| {
        out[*cursor..*cursor + vals.len()].copy_from_slice(vals);
        *cursor += vals.len();
    };
    match metric {
        Metric::Ssd => {
            let a: Vec<f64> = st.edge.iter().map(|&e| -2.0 * e * scale).collect();
            push(&a);
            *const_acc += st.sum_e2 * scale;
        }
        Metric::Mgc | Metric::Emgc => {
            let tilde: Vec<f64> = st.edge.iter().map(|&e| -2.0 * st.w * e * scale).collect();
            push(&tilde);
            let plain: Vec<f64> = st.edge.iter().map(|&e| e * scale).collect();
            push(&plain);
            push(&[st.w * scale, -2.0 * st.mu * st.w * scale, st.sum_e2 * scale, st.sum_e * scale]);
            *const_acc += st.self_term * scale;
            if metric == Metric::Emgc {
                let qtilde: Vec<f64> =
                    st.qedge.iter().map(|&q| -2.0 * st.wp * q * scale).collect();
                push(&qtilde);
                let qplain: Vec<f64> = st.qedge.iter().map(|&q| q * scale).collect();
                push(&qplain);
                push(&[
                    st.wp * scale,
                    -2.0 * st.mup * st.wp * scale,
                    st.sum_q2 * scale,
                    st.sum_q * scale,
                ]);
                *const_acc += st.self_term_par * scale;
            }
        }
    }
}

fn fill_col_features(metric: Metric, st: &SideStats, out: &mut [f64], cursor: &mut usize, const_acc: &mut f64) {
    let mut push = |vals: &[f64]| {
        out[*cursor..*cursor + vals.len()].copy_from_slice(vals);
        *cursor += vals.len();
    };
    match metric {
        Metric::Ssd => {
            push(&st.edge);
            *const_acc += st.sum_e2;
        }
        Metric::Mgc | Metric::Emgc => {
            push(&st.edge);
            let tilde: Vec<f64> = st.edge.iter().map(|&e| -2.0 * st.w * e).collect();
            push(&tilde);
            push(&[st.sum_e2, st.sum_e, st.w, -2.0 * st.mu * st.w]);
            *const_acc += st.self_term;
            if metric == Metric::Emgc {
                push(&st.qedge);
                let qtilde: Vec<f64> = st.qedge.iter().map(|&q| -2.0 * st.wp * q).collect();
                push(&qtilde);
                push(&[st.sum_q2, st.sum_q, st.wp, -2.0 * st.mup * st.wp]);
                *const_acc += st.self_term_par;
            }
        }
    }
}

struct FeatureTables {
    /// Row features, `[(block, side, channel)] x dim`, row-major.
    rows: Vec<f32>,
    /// Column features transposed: `dim x [(block, variant, channel)]`.
    cols_t: Vec<f32>,
    dim: usize,
    geo_variants: usize,
    channels: usize,
}

fn build_tables(
    images: &[Vec<Block>],
    metric: Metric,
    kind: PuzzleKind,
    n: usize,
    p: usize,
) -> Result<FeatureTables> {
    let m = images.len();
    let channels = images[0][0].channels();
    let geo_variants = if kind == PuzzleKind::Type0 { 4 } else { 16 };
    let dim = feature_dim(metric, p, m);
    let scale = 1.0 / m as f64;

    let per_image: Vec<SideColumns> =
        images.iter().map(|blocks| extract_columns(blocks, kind)).collect::<Result<_>>()?;

    let n_rows = n * 4 * channels;
    let n_cols = n * geo_variants * channels;
    let mut rows = vec![0f32; n_rows * dim];
    let mut cols_t = vec![0f32; n_cols * dim];

    let mut scratch = vec![0f64; dim];
    for b in 0..n {
        for s in 0..4 {
            for ch in 0..channels {
                scratch.iter_mut().for_each(|v| *v = 0.0);
                let mut cursor = 0usize;
                let mut const_acc = 0f64;
                for cols in &per_image {
                    let (edge, inner) = &cols.rows[b][s][ch];
                    let st = side_stats(edge, inner);
                    fill_row_features(metric, &st, scale, &mut scratch, &mut cursor, &mut const_acc);
                }
                scratch[cursor] = const_acc;
                scratch[cursor + 1] = scale;
                let row_idx = (b * 4 + s) * channels + ch;
                for (d, &v) in scratch.iter().enumerate() {
                    rows[row_idx * dim + d] = v as f32;
                }
            }
        }
        for k in 0..geo_variants {
            for ch in 0..channels {
                scratch.iter_mut().for_each(|v| *v = 0.0);
                let mut cursor = 0usize;
                let mut const_acc = 0f64;
                for cols in &per_image {
                    let (edge, inner) = &cols.cols[b][k][ch];
                    let st = side_stats(edge, inner);
                    fill_col_features(metric, &st, &mut scratch, &mut cursor, &mut const_acc);
                }
                scratch[cursor] = 1.0;
                scratch[cursor + 1] = const_acc;
                let col_idx = (b * geo_variants + k) * channels + ch;
                for (d, &v) in scratch.iter().enumerate() {
                    cols_t[d * n_cols + col_idx] = v as f32;
                }
            }
        }
    }
    Ok(FeatureTables { rows, cols_t, dim, geo_variants, channels })
}

/// `out[r][c] = dot(rows[r], cols[:, c])` for a tile of rows.
fn gemm_tile(rows: &[f32], cols_t: &[f32], dim: usize, n_cols: usize, out: &mut [f32]) {
    let n_rows = rows.len() / dim;
    debug_assert_eq!(out.len(), n_rows * n_cols);
    unsafe {
        matrixmultiply::sgemm(
            n_rows,
            dim,
            n_cols,
            1.0,
            rows.as_ptr(),
            dim as isize,
            1,
            cols_t.as_ptr(),
            n_cols as isize,
            1,
            0.0,
            out.as_mut_ptr(),
            n_cols as isize,
            1,
        );
    }
}

/// A reduced row tile: normalized survivors, best first.
struct RowReduction {
    entries: Vec<(f32, u32, u32)>,
    dense_row: Option<Vec<f32>>,
}

fn reduce_row(raw: &[f32], kc: usize, top_k: usize, keep_dense: bool) -> RowReduction {
    // Two smallest finite values define the normalizer; same-block columns
    // were already set to infinity.
    let mut min1 = f32::INFINITY;
    let mut min2 = f32::INFINITY;
    for &w in raw {
        if w < min1 {
            min2 = min1;
            min1 = w;
        } else if w < min2 {
            min2 = w;
        }
    }
    let norm = if min2.is_finite() && min2 > 1e-12 { min2 } else { 1e-12 };
    let inv = 1.0 / norm;

    let mut keep: Vec<(f32, u32, u32)> = Vec::with_capacity(top_k + 1);
    let mut dense_row = keep_dense.then(|| vec![0f32; raw.len()]);
    for (idx, &w) in raw.iter().enumerate() {
        if !w.is_finite() {
            if let Some(d) = dense_row.as_mut() {
                d[idx] = f32::INFINITY;
            }
            continue;
        }
        let nw = (w * inv).max(0.0);
        if let Some(d) = dense_row.as_mut() {
            d[idx] = nw;
        }
        insert_bounded(&mut keep, (nw, (idx / kc) as u32, (idx % kc) as u32), top_k);
    }
    RowReduction { entries: keep, dense_row }
}

/// Score every (block, side) against every candidate (block, configuration)
/// over all cipher-images, average, and normalize each slice by its second
/// smallest raw entry.
pub fn score_all(
    ciphers: &[PlanarImage],
    metric: Metric,
    kind: PuzzleKind,
    block_size: usize,
) -> Result<ScoreTensor> {
    score_all_with_options(ciphers, metric, kind, block_size, TensorOptions::default())
}

pub fn score_all_with_options(
    ciphers: &[PlanarImage],
    metric: Metric,
    kind: PuzzleKind,
    block_size: usize,
    options: TensorOptions,
) -> Result<ScoreTensor> {
    if ciphers.is_empty() {
        return Err(Error::invalid("need at least one cipher-image"));
    }
    let (w0, h0, c0) = (ciphers[0].width(), ciphers[0].height(), ciphers[0].channels());
    if ciphers.iter().any(|c| c.width() != w0 || c.height() != h0 || c.channels() != c0) {
        return Err(Error::invalid("cipher-images must share dimensions"));
    }
    let want_channels = if kind == PuzzleKind::Etc { 3 } else { 1 };
    if c0 != want_channels {
        return Err(Error::invalid("cipher channel count does not match puzzle kind"));
    }
    if metric != Metric::Ssd && block_size < 3 {
        return Err(Error::invalid("gradient metrics need blocks of at least 3 pixels"));
    }

    let mut images = Vec::with_capacity(ciphers.len());
    let mut grid: Option<BlockGrid> = None;
    for img in ciphers {
        let (blocks, g) = split_blocks(img, block_size, block_size)?;
        grid = Some(g);
        images.push(blocks);
    }
    let grid = grid.unwrap();
    let n = grid.n;
    let kc = kind.config_count();

    let tables = build_tables(&images, metric, kind, n, block_size)?;
    let dense = n * 4 * n * kc * 4 <= options.dense_limit_bytes;
    let top_k = options.top_k.max(2).min(n.saturating_sub(1) * kc);
    let tile_rows = options.tile_rows.max(1);

    // Process (block, side) rows in tiles; each tile runs one matrix
    // product per channel and reduces its rows independently, so tiles can
    // run on any worker without changing the result.
    let tiles: Vec<(usize, usize)> = (0..n * 4)
        .step_by(tile_rows)
        .map(|start| (start, (start + tile_rows).min(n * 4)))
        .collect();

    let reductions: Vec<Vec<RowReduction>> = tiles
        .par_iter()
        .map(|&(row_start, row_end)| reduce_tile(&tables, n, kc, row_start, row_end, top_k, dense))
        .collect();

    let storage = if dense {
        let mut data = vec![f32::INFINITY; n * 4 * n * kc];
        for (tile_idx, tile) in reductions.iter().enumerate() {
            let (row_start, _) = tiles[tile_idx];
            for (off, red) in tile.iter().enumerate() {
                let row = row_start + off;
                let dst = &mut data[row * n * kc..(row + 1) * n * kc];
                dst.copy_from_slice(red.dense_row.as_ref().expect("dense mode keeps rows"));
            }
        }
        Storage::Dense(data)
    } else {
        let mut entries = vec![(f32::INFINITY, 0u32, 0u32); n * 4 * top_k];
        for (tile_idx, tile) in reductions.iter().enumerate() {
            let (row_start, _) = tiles[tile_idx];
            for (off, red) in tile.iter().enumerate() {
                let row = row_start + off;
                for (slot, &e) in red.entries.iter().enumerate() {
                    entries[row * top_k + slot] = e;
                }
            }
        }
        Storage::TopK { top_k, entries }
    };

    Ok(ScoreTensor { n, kind, block_size, normalized: true, storage })
}

#[allow(clippy::too_many_arguments)]
fn reduce_tile(
    tables: &FeatureTables,
    n: usize,
    kc: usize,
    row_start: usize,
    row_end: usize,
    top_k: usize,
    keep_dense: bool,
) -> Vec<RowReduction> {
    let geo = tables.geo_variants;
    let channels = tables.channels;
    let n_cols = n * geo * channels;
    let rows_here = row_end - row_start;

    let row_slice =
        &tables.rows[row_start * channels * tables.dim..row_end * channels * tables.dim];
    let mut product = vec![0f32; rows_here * channels * n_cols];
    gemm_tile(row_slice, &tables.cols_t, tables.dim, n_cols, &mut product);

    let mut out = Vec::with_capacity(rows_here);
    let mut raw = vec![0f32; n * kc];
    for local in 0..rows_here {
        let u = (row_start + local) / 4;
        if channels == 1 {
            // Grayscale kinds have kc == geo, so the product row is the
            // score row directly.
            raw.copy_from_slice(&product[local * n_cols..(local + 1) * n_cols]);
        } else {
            // Color: sum the channel-pair products dictated by each of the
            // six channel orders.
            use crate::imgcore::COLOR_PERMS;
            for v in 0..n {
                for g in 0..geo {
                    let col_base = (v * geo + g) * channels;
                    let mut dots = [[0f32; 3]; 3];
                    for (j, dj) in dots.iter_mut().enumerate() {
                        let prow = &product[(local * channels + j) * n_cols..];
                        for (jp, d) in dj.iter_mut().enumerate() {
                            *d = prow[col_base + jp];
                        }
                    }
                    for (c, perm) in COLOR_PERMS.iter().enumerate() {
                        let score =
                            dots[0][perm[0]] + dots[1][perm[1]] + dots[2][perm[2]];
                        raw[(v * geo + g) * 6 + c] = score;
                    }
                }
            }
        }
        // Same-block sentinel.
        for k in 0..kc {
            raw[u * kc + k] = f32::INFINITY;
        }
        out.push(reduce_row(&raw, kc, top_k, keep_dense));
    }
    out
}
