use serde::{Deserialize, Serialize};

use crate::{
    gallery_appendix_a, gallery_dirac_cascade, gallery_dirac_plus_lebesgue, gallery_h_gt_q, gallery_one_point,
    gallery_q_gt_h, gallery_ring_measure, gallery_selfsimilar,
};
use mfdm_measures::{lebesgue_proxy, AtomicMeasure, Measure};
use mfdm_metric::{Error, MetricSpace, Result};

/// Atoms per unsplit burst (as a power of two) in the atomic view of `q-gt-h`.
pub const BURST_VIEW_LOG2: u32 = 8;

fn one() -> usize {
    1
}

/// Serializable description of a measure: explicit atoms or a generator call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeasureDef {
    Atomic {
        points: Vec<Vec<f64>>,
        masses: Vec<f64>,
        #[serde(default)]
        normalize: bool,
    },
    Lebesgue {
        per_axis: usize,
        #[serde(default = "one")]
        dim: usize,
    },
    #[serde(rename = "selfsimilar")]
    SelfSimilar { ratios: Vec<f64>, weights: Vec<f64>, depth: usize },
    DiracCascade {
        schedule: Vec<u32>,
        #[serde(default = "one")]
        dim: usize,
    },
    DiracLebesgue { n_atoms: usize },
    HGtQ { stages: usize },
    QGtH { stages: usize },
    OnePoint { stages: usize },
    Rings { rings: usize, atoms_per_ring: usize },
    AppendixA { depth: usize },
}

impl MeasureDef {
    pub fn name(&self) -> &'static str {
        match self {
            MeasureDef::Atomic { .. } => "atomic",
            MeasureDef::Lebesgue { .. } => "lebesgue",
            MeasureDef::SelfSimilar { .. } => "selfsimilar",
            MeasureDef::DiracCascade { .. } => "dirac-cascade",
            MeasureDef::DiracLebesgue { .. } => "dirac-lebesgue",
            MeasureDef::HGtQ { .. } => "h-gt-q",
            MeasureDef::QGtH { .. } => "q-gt-h",
            MeasureDef::OnePoint { .. } => "one-point",
            MeasureDef::Rings { .. } => "rings",
            MeasureDef::AppendixA { .. } => "appendix-a",
        }
    }

    /// Materialize the measure. Trees stay trees, except `q-gt-h`, whose
    /// geometry is only available through its atomic view.
    pub fn build(&self) -> Result<Measure> {
        Ok(match self {
            MeasureDef::Atomic { points, masses, normalize } => {
                let d = points.first().ok_or(Error::EmptyInput)?.len();
                Measure::Atomic(AtomicMeasure::new(MetricSpace::euclidean(d, points)?, masses.clone(), *normalize)?)
            }
            MeasureDef::Lebesgue { per_axis, dim } => Measure::Atomic(lebesgue_proxy(*per_axis, *dim)?),
            MeasureDef::SelfSimilar { ratios, weights, depth } => {
                Measure::Tree(gallery_selfsimilar(ratios, weights, *depth)?)
            }
            MeasureDef::DiracCascade { schedule, dim } => Measure::Atomic(gallery_dirac_cascade(schedule, *dim)?),
            MeasureDef::DiracLebesgue { n_atoms } => Measure::Atomic(gallery_dirac_plus_lebesgue(*n_atoms)?),
            MeasureDef::HGtQ { stages } => Measure::Tree(gallery_h_gt_q(*stages)?.tree),
            MeasureDef::QGtH { stages } => Measure::Atomic(gallery_q_gt_h(*stages)?.atoms(BURST_VIEW_LOG2)?),
            MeasureDef::OnePoint { stages } => Measure::Atomic(gallery_one_point(*stages)?.measure),
            MeasureDef::Rings { rings, atoms_per_ring } => Measure::Atomic(gallery_ring_measure(*rings, *atoms_per_ring)?),
            MeasureDef::AppendixA { depth } => Measure::Atomic(gallery_appendix_a(*depth)?.measure),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_match_tags() {
        let defs = [
            MeasureDef::HGtQ { stages: 1 },
            MeasureDef::QGtH { stages: 1 },
            MeasureDef::AppendixA { depth: 1 },
            MeasureDef::SelfSimilar { ratios: vec![0.5], weights: vec![1.0], depth: 1 },
            MeasureDef::DiracLebesgue { n_atoms: 4 },
        ];
        for d in defs {
            let tag = match d {
                MeasureDef::HGtQ { .. } => "h-gt-q",
                MeasureDef::QGtH { .. } => "q-gt-h",
                MeasureDef::AppendixA { .. } => "appendix-a",
                MeasureDef::SelfSimilar { .. } => "selfsimilar",
                _ => "dirac-lebesgue",
            };
            assert_eq!(d.name(), tag);
        }
    }
}
