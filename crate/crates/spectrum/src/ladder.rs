use std::collections::HashMap;

use mfdm_measures::{AtomicMeasure, Measure, MeasureTree};
use mfdm_metric::{Error, Result};

/// Where a ladder cell lives.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Interval(f64, f64),
    Cube { corner: Vec<f64>, side: f64 },
    /// Cells of a tree without coordinates.
    Abstract,
}

impl Region {
    /// Distance from `x` to the region (0 inside); abstract regions are at distance 0.
    pub fn dist(&self, x: &[f64]) -> f64 {
        match self {
            Region::Interval(lo, hi) => {
                let t = x[0];
                if t < *lo {
                    lo - t
                } else if t > *hi {
                    t - hi
                } else {
                    0.0
                }
            }
            Region::Cube { corner, side } => corner
                .iter()
                .zip(x)
                .map(|(c, t)| {
                    let d = if *t < *c {
                        c - t
                    } else if *t > c + side {
                        t - c - side
                    } else {
                        0.0
                    };
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
            Region::Abstract => 0.0,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        !matches!(self, Region::Abstract) && self.dist(x) == 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderCell {
    pub mass: f64,
    pub diam: f64,
    /// Index of the enclosing cell on the previous rung.
    pub parent: Option<usize>,
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rung {
    pub scale: f64,
    pub cells: Vec<LadderCell>,
}

/// Nested partitions at decreasing scales, each cell linked to its parent.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    pub rungs: Vec<Rung>,
    pub dim: usize,
    /// `log₂ N` for the ambient doubling constant `N = 4^dim`.
    pub log2_doubling: f64,
    /// Every cell of a rung has the rung's scale as its size.
    pub uniform: bool,
}

impl Ladder {
    pub fn len(&self) -> usize {
        self.rungs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rungs.is_empty()
    }

    /// Drop the two coarsest rungs and the finest one, when enough rungs exist.
    pub fn default_window(&self) -> (usize, usize) {
        let l = self.rungs.len();
        if l >= 5 {
            (2, l - 2)
        } else {
            (0, l.saturating_sub(1))
        }
    }

    pub fn check_window(&self, w: (usize, usize)) -> Result<()> {
        if w.0 >= w.1 || w.1 >= self.rungs.len() {
            return Err(Error::Depth(format!("window {w:?} outside ladder of {} rungs", self.rungs.len())));
        }
        Ok(())
    }

    /// Per rung in the window, which cells descend from the cells of the first
    /// window rung that meet `B(x, r)`. `None` selects everything.
    pub fn local_masks(&self, centre: Option<(&[f64], f64)>, w: (usize, usize)) -> Vec<Vec<bool>> {
        let mut masks: Vec<Vec<bool>> = Vec::with_capacity(w.1 - w.0 + 1);
        let first = &self.rungs[w.0];
        masks.push(match centre {
            Some((x, r)) => first.cells.iter().map(|c| c.region.dist(x) <= r * (1.0 + 1e-12)).collect(),
            None => vec![true; first.cells.len()],
        });
        for k in w.0 + 1..=w.1 {
            let prev = masks.last().unwrap();
            let m = self.rungs[k].cells.iter().map(|c| c.parent.map(|p| prev[p]).unwrap_or(false)).collect();
            masks.push(m);
        }
        masks
    }

    /// Index of the cell holding `x` on rung `k`.
    pub fn cell_containing(&self, k: usize, x: &[f64]) -> Option<usize> {
        self.rungs[k].cells.iter().position(|c| c.region.contains(x))
    }
}

fn uniform_levels(tree: &MeasureTree) -> bool {
    (0..=tree.max_depth()).all(|n| {
        let lv = tree.level(n).unwrap();
        let d0 = tree.cell(lv[0]).diam();
        lv.iter().all(|&i| ((tree.cell(i).diam() - d0) / d0).abs() < 1e-9)
    }) && tree.is_complete()
}

/// Tree levels when every level has one common diameter, otherwise Moran cuts
/// at the scales `diam(root) 2^{-k}` down to the largest leaf.
pub fn tree_ladder(tree: &MeasureTree) -> Result<Ladder> {
    let region = |i: usize| {
        let c = tree.cell(i);
        if tree.is_embedded() {
            Region::Interval(c.lo, c.hi)
        } else {
            Region::Abstract
        }
    };
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    let uniform = uniform_levels(tree);
    if uniform {
        for n in 0..=tree.max_depth() {
            let lv = tree.level(n)?.to_vec();
            groups.push((tree.cell(lv[0]).diam(), lv));
        }
    } else {
        let root = tree.cell(0).diam();
        for k in 0..64 {
            let s = root * 0.5f64.powi(k);
            match tree.cut(s) {
                Ok(cells) => groups.push((s, cells)),
                Err(_) => break,
            }
        }
    }
    let mut rungs: Vec<Rung> = Vec::with_capacity(groups.len());
    let mut prev_map: HashMap<usize, usize> = HashMap::new();
    for (scale, cells) in groups {
        let mut out = Vec::with_capacity(cells.len());
        let mut map = HashMap::with_capacity(cells.len());
        for (k, &i) in cells.iter().enumerate() {
            map.insert(i, k);
            let parent = if rungs.is_empty() {
                None
            } else {
                let mut j = Some(i);
                let mut found = None;
                while let Some(a) = j {
                    if let Some(&p) = prev_map.get(&a) {
                        found = Some(p);
                        break;
                    }
                    j = tree.cell(a).parent;
                }
                found
            };
            out.push(LadderCell { mass: tree.cell(i).mass, diam: tree.cell(i).diam(), parent, region: region(i) });
        }
        rungs.push(Rung { scale, cells: out });
        prev_map = map;
    }
    Ok(Ladder { rungs, dim: 1, log2_doubling: 2.0, uniform })
}

/// Dyadic cubes over a box around the support, rungs `0..=levels`.
///
/// The box side is the support extent plus one mean atom spacing, so a regular
/// grid of atoms lands one atom per cube at the finest natural rung.
pub fn atomic_ladder(m: &AtomicMeasure, levels: Option<usize>) -> Result<Ladder> {
    let d = m.space().dim().ok_or_else(|| Error::Unsupported("dyadic cells need coordinates".into()))?;
    let n = m.len();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for i in 0..n {
        for (a, &c) in m.space().coords(i).unwrap().iter().enumerate() {
            lo[a] = lo[a].min(c);
            hi[a] = hi[a].max(c);
        }
    }
    let extent = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0f64, f64::max);
    let per_axis = (n as f64).powf(1.0 / d as f64).round().max(1.0);
    let side = if extent > 0.0 { extent + extent / (per_axis - 1.0).max(1.0) } else { 1.0 };
    let corner: Vec<f64> = if extent > 0.0 {
        lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b) - 0.5 * side).collect()
    } else {
        lo.iter().map(|a| a - 0.5).collect()
    };
    let natural = ((n as f64).log2() / d as f64).floor() as usize;
    let levels = levels.unwrap_or(natural.max(6)).min(40);

    let mut rungs: Vec<Rung> = Vec::with_capacity(levels + 1);
    let mut prev_index: HashMap<Vec<u64>, usize> = HashMap::new();
    for k in 0..=levels {
        let cells_per_axis = 1u64 << k;
        let w = side / cells_per_axis as f64;
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut cells: Vec<LadderCell> = Vec::new();
        for i in 0..n {
            let key: Vec<u64> = m
                .space()
                .coords(i)
                .unwrap()
                .iter()
                .zip(&corner)
                .map(|(c, o)| (((c - o) / w).floor().max(0.0) as u64).min(cells_per_axis - 1))
                .collect();
            let id = match index.get(&key) {
                Some(&id) => id,
                None => {
                    let parent = if k == 0 {
                        None
                    } else {
                        prev_index.get(&key.iter().map(|v| v >> 1).collect::<Vec<u64>>()).copied()
                    };
                    let c: Vec<f64> = key.iter().zip(&corner).map(|(v, o)| o + *v as f64 * w).collect();
                    cells.push(LadderCell { mass: 0.0, diam: w * (d as f64).sqrt(), parent, region: Region::Cube { corner: c, side: w } });
                    index.insert(key, cells.len() - 1);
                    cells.len() - 1
                }
            };
            cells[id].mass += m.mass(i);
        }
        rungs.push(Rung { scale: w, cells });
        prev_index = index;
    }
    Ok(Ladder { rungs, dim: d, log2_doubling: 2.0 * d as f64, uniform: true })
}

pub fn ladder(m: &Measure) -> Result<Ladder> {
    match m {
        Measure::Tree(t) => tree_ladder(t),
        Measure::Atomic(a) => atomic_ladder(a, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cantor(depth: usize) -> MeasureTree {
        let mut t = MeasureTree::new(0.0, 1.0, 1.0).unwrap();
        let mut frontier = vec![0];
        for _ in 0..depth {
            let mut next = vec![];
            for &c in &frontier {
                let (lo, hi, m) = (t.cell(c).lo, t.cell(c).hi, t.cell(c).mass);
                let l = (hi - lo) / 3.0;
                next.push(t.add_child(c, lo, lo + l, m / 2.0).unwrap());
                next.push(t.add_child(c, hi - l, hi, m / 2.0).unwrap());
            }
            frontier = next;
        }
        t
    }

    #[test]
    fn levels_for_uniform_tree() {
        let l = tree_ladder(&cantor(5)).unwrap();
        assert_eq!(l.len(), 6);
        assert!((l.rungs[3].scale - 1.0 / 27.0).abs() < 1e-15);
        assert_eq!(l.rungs[3].cells.len(), 8);
        assert_eq!(l.rungs[3].cells[5].parent, Some(2));
        assert_eq!(l.default_window(), (2, 4));
    }

    #[test]
    fn masks_follow_descendants() {
        let l = tree_ladder(&cantor(4)).unwrap();
        let masks = l.local_masks(Some((&[0.0], 0.05)), (2, 4));
        assert_eq!(masks[0].iter().filter(|b| **b).count(), 1);
        assert_eq!(masks[2].iter().filter(|b| **b).count(), 4);
    }

    #[test]
    fn dyadic_cells_of_a_grid() {
        let m = mfdm_measures::lebesgue_proxy(64, 1).unwrap();
        let l = atomic_ladder(&m, None).unwrap();
        assert_eq!(l.len(), 7);
        assert_eq!(l.rungs[6].cells.len(), 64);
        assert!(l.rungs[6].cells.iter().all(|c| (c.mass - 1.0 / 64.0).abs() < 1e-15));
        let total: f64 = l.rungs[3].cells.iter().map(|c| c.mass).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
