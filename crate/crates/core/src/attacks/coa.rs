//! Ciphertext-only attack orchestration: score, assemble, render.

use crate::compat::{score_all_with_options, Metric, PuzzleKind, ScoreTensor, TensorOptions};
use crate::error::Result;
use crate::imgcore::{split_blocks, PlanarImage};
use crate::solver::{render, solve_with_options, Assembly, SolveOptions};

pub struct CoaResult {
    pub tensor: ScoreTensor,
    pub assembly: Assembly,
    /// Recovered planes of the first cipher-image, largest fragment first.
    pub planes: Vec<PlanarImage>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CoaOptions {
    pub tensor: TensorOptions,
    pub solve: SolveOptions,
}

/// Run the full ciphertext-only attack on cipher-images sharing one key:
/// compatibility tensor over all configurations, greedy assembly (three
/// fragments for the flattened scheme, one otherwise), and rendered planes.
pub fn coa(
    ciphers: &[PlanarImage],
    metric: Metric,
    kind: PuzzleKind,
    options: CoaOptions,
) -> Result<CoaResult> {
    let block = if kind == PuzzleKind::Etc { 16 } else { 8 };
    let tensor = score_all_with_options(ciphers, metric, kind, block, options.tensor)?;
    let n = tensor.n();
    let cap = if kind == PuzzleKind::Etc { n } else { n / 3 };
    let assembly = solve_with_options(&tensor, cap, options.solve);
    let (blocks, _) = split_blocks(&ciphers[0], block, block)?;
    let planes = render(&assembly, &blocks)?;
    Ok(CoaResult { tensor, assembly, planes })
}
