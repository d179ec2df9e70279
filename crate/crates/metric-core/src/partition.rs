use crate::error::{Error, Result};
use crate::packing::{maximal_packing, Ball};
use crate::space::MetricSpace;
use crate::TOL;

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionCell {
    pub id: usize,
    pub members: Vec<usize>,
    pub ball: Ball,
}

/// A `delta`-partition: cells `Q` with `B ∩ A ⊆ Q ⊆ ΛB`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionLevel {
    pub scale: f64,
    pub lambda: f64,
    pub cells: Vec<PartitionCell>,
}

impl PartitionLevel {
    /// Check exact cover of `subset`, disjointness, and the sandwich on stored points.
    pub fn verify(&self, space: &MetricSpace, subset: &[usize]) -> Result<()> {
        let mut owner = vec![usize::MAX; space.len()];
        for cell in &self.cells {
            for &m in &cell.members {
                if owner[m] != usize::MAX {
                    return Err(Error::precondition(format!("point {m} in two cells")));
                }
                owner[m] = cell.id;
            }
        }
        for &a in subset {
            if owner[a] == usize::MAX {
                return Err(Error::precondition(format!("point {a} not covered")));
            }
        }
        let total: usize = self.cells.iter().map(|c| c.members.len()).sum();
        if total != subset.len() {
            return Err(Error::precondition("cells contain points outside the set"));
        }
        for cell in &self.cells {
            let c = cell.ball.center;
            let r = cell.ball.radius;
            for &m in &cell.members {
                if space.dist(m, c) > self.lambda * r * (1.0 + TOL) {
                    return Err(Error::precondition(format!("point {m} outside the dilated ball")));
                }
            }
            for &a in subset {
                if space.dist(a, c) <= r * (1.0 + TOL) && owner[a] != cell.id {
                    return Err(Error::precondition(format!("ball point {a} assigned elsewhere")));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Largest cell diameter measured on stored points.
    pub fn max_cell_diameter(&self, space: &MetricSpace) -> f64 {
        let mut best: f64 = 0.0;
        for cell in &self.cells {
            for (i, &a) in cell.members.iter().enumerate() {
                for &b in &cell.members[i + 1..] {
                    best = best.max(space.dist(a, b));
                }
            }
        }
        best
    }
}

/// Build a `delta`-partition of `subset`: maximal packing, then nearest-centre
/// assignment with the lowest cell index winning ties.
pub fn build_partition(
    space: &MetricSpace,
    subset: &[usize],
    delta: f64,
    lambda: f64,
) -> Result<PartitionLevel> {
    if !(lambda >= 2.0) {
        return Err(Error::domain("expansion constant must be at least 2"));
    }
    let packing = maximal_packing(space, subset, delta)?;
    let mut cells: Vec<PartitionCell> = packing
        .balls
        .iter()
        .enumerate()
        .map(|(id, &ball)| PartitionCell { id, members: Vec::new(), ball })
        .collect();
    for &a in subset {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (id, cell) in cells.iter().enumerate() {
            let d = space.dist(a, cell.ball.center);
            if d < best_d {
                best_d = d;
                best = id;
            }
        }
        cells[best].members.push(a);
    }
    Ok(PartitionLevel { scale: delta, lambda, cells })
}
