//! Finite-depth generators for the explicit example measures.
//!
//! Every construction is infinite; each generator takes an explicit stage
//! parameter and documents which of its claims hold exactly at every stage and
//! which are limit statements that can only be checked as trends.

mod appendix;
mod bursts;
mod cascade;
mod def;
mod fingerprint;
mod one_point;
mod perturbed;
mod rings;

pub use appendix::{gallery_appendix_a, ratio_formula, AppendixA, RatioRow};
pub use bursts::{gallery_h_gt_q, stage_ratio, BurstStage, BurstTree};
pub use cascade::{gallery_dirac_cascade, gallery_dirac_plus_lebesgue, CASCADE_MAX_ATOMS};
pub use def::{MeasureDef, BURST_VIEW_LOG2};
pub use fingerprint::{fingerprint_atomic, fingerprint_tree};
pub use one_point::{gallery_one_point, one_point_schedule, OnePoint, OnePointStage};
pub use perturbed::{designed_lhs, gallery_q_gt_h, minimal_m, PerturbedStage, PerturbedTree, BURST_SPLIT_MAX};
pub use rings::{gallery_ring_measure, ring_atoms_for};

use mfdm_moran::{build_selfsimilar_tree, SelfSimilarSpec};
use mfdm_measures::MeasureTree;
use mfdm_metric::Result;

/// Self-similar measure on `[0,1]` built to `depth` levels.
pub fn gallery_selfsimilar(ratios: &[f64], weights: &[f64], depth: usize) -> Result<MeasureTree> {
    build_selfsimilar_tree(&SelfSimilarSpec::new(ratios.to_vec(), weights.to_vec())?, depth)
}
