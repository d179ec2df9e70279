//! Measure backends: finite atomic measures and nested Moran measure trees.

mod atomic;
mod index;
mod tree;

pub use atomic::{lebesgue_proxy, AtomicMeasure};
pub use index::SHELL;
pub use tree::{partition_sum, partition_sum_cells, MeasureTree, MoranPartition, TreeCell};

use mfdm_metric::{Point, Result};

/// Mass of a closed ball plus a flag for atoms or cells sitting on its sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassQueryResult {
    pub mass: f64,
    pub boundary: bool,
}

/// Either backend behind one handle.
#[derive(Debug, Clone)]
pub enum Measure {
    Atomic(AtomicMeasure),
    Tree(MeasureTree),
}

impl Measure {
    pub fn ball_mass(&self, centre: &Point, r: f64) -> Result<MassQueryResult> {
        match self {
            Measure::Atomic(m) => Ok(m.ball_mass(centre, r)),
            Measure::Tree(t) => match centre {
                Point::Coords(c) if c.len() == 1 => t.ball_mass(c[0], r),
                _ => Err(mfdm_metric::Error::domain("tree queries take a real coordinate")),
            },
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            Measure::Atomic(m) => m.total_mass(),
            Measure::Tree(t) => t.total_mass(),
        }
    }

    /// Atomic view: the measure itself, or atoms at the leaf representatives.
    pub fn to_atomic(&self) -> Result<AtomicMeasure> {
        match self {
            Measure::Atomic(m) => Ok(m.clone()),
            Measure::Tree(t) => t.leaf_measure(),
        }
    }
}
