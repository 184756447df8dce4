//! Evaluation measures, fixture corpus generation, and experiment sweeps.

mod corpus;
mod measures;
mod sweep;

pub use corpus::gen_corpus;
pub use measures::{
    channel_groups, largest_component, neighbor_comparison, pixel_correlation, psnr,
    truth_assembly, Correctness,
};
pub use sweep::{run_sweep, run_sweep_reports, AttackKind, EvalReport, SweepConfig, CSV_HEADER};
