use crate::atomic::AtomicMeasure;
use crate::MassQueryResult;
use mfdm_metric::{Ball, Error, MetricSpace, PartitionCell, PartitionLevel, Result, TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct TreeCell {
    pub word: Vec<u32>,
    pub depth: usize,
    pub mass: f64,
    /// Interval `[lo, hi]`; for abstract trees only `hi - lo` is meaningful.
    pub lo: f64,
    pub hi: f64,
    /// Representative interior point.
    pub rep: f64,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

impl TreeCell {
    pub fn diam(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Nested construction cells with masses; by default embedded in `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureTree {
    cells: Vec<TreeCell>,
    levels: Vec<Vec<usize>>,
    embedded: bool,
}

/// Cells of one Moran cut together with the scale that defined it.
#[derive(Debug, Clone, PartialEq)]
pub struct MoranPartition {
    pub level: usize,
    pub threshold: f64,
    pub cells: Vec<usize>,
}

impl MeasureTree {
    pub fn new(lo: f64, hi: f64, mass: f64) -> Result<Self> {
        if !(hi > lo) || !(mass >= 0.0) {
            return Err(Error::domain("root needs a nondegenerate interval and nonnegative mass"));
        }
        let root = TreeCell {
            word: Vec::new(),
            depth: 0,
            mass,
            lo,
            hi,
            rep: 0.5 * (lo + hi),
            parent: None,
            children: Vec::new(),
        };
        Ok(MeasureTree { cells: vec![root], levels: vec![vec![0]], embedded: true })
    }

    /// Tree without coordinates; ball queries are unavailable.
    pub fn new_abstract(diam: f64, mass: f64) -> Result<Self> {
        let mut t = Self::new(0.0, diam, mass)?;
        t.embedded = false;
        Ok(t)
    }

    pub fn is_embedded(&self) -> bool {
        self.embedded
    }

    /// Append a child interval; its word extends the parent's by the child position.
    pub fn add_child(&mut self, parent: usize, lo: f64, hi: f64, mass: f64) -> Result<usize> {
        if parent >= self.cells.len() {
            return Err(Error::domain("no such parent cell"));
        }
        if !(hi > lo) || !(mass >= 0.0) {
            return Err(Error::domain("child needs a nondegenerate interval and nonnegative mass"));
        }
        let id = self.cells.len();
        let p = &self.cells[parent];
        let mut word = p.word.clone();
        word.push(p.children.len() as u32);
        let depth = p.depth + 1;
        self.cells.push(TreeCell {
            word,
            depth,
            mass,
            lo,
            hi,
            rep: 0.5 * (lo + hi),
            parent: Some(parent),
            children: Vec::new(),
        });
        self.cells[parent].children.push(id);
        if self.levels.len() <= depth {
            self.levels.push(Vec::new());
        }
        self.levels[depth].push(id);
        Ok(id)
    }

    pub fn set_rep(&mut self, cell: usize, rep: f64) {
        self.cells[cell].rep = rep;
    }

    pub fn cell(&self, i: usize) -> &TreeCell {
        &self.cells[i]
    }

    pub fn cells(&self) -> &[TreeCell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> Result<&[usize]> {
        self.levels
            .get(n)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::Depth(format!("level {n} beyond depth {}", self.max_depth())))
    }

    pub fn total_mass(&self) -> f64 {
        self.cells[0].mass
    }

    /// Cells without children, in level order.
    pub fn leaves(&self) -> Vec<usize> {
        self.levels.iter().flatten().copied().filter(|&i| self.cells[i].children.is_empty()).collect()
    }

    /// Whether every leaf sits at the deepest level.
    pub fn is_complete(&self) -> bool {
        self.leaves().iter().all(|&i| self.cells[i].depth == self.max_depth())
    }

    /// Mass conservation, strictly shrinking nested children, disjoint siblings.
    pub fn check_invariants(&self) -> Result<()> {
        for (i, c) in self.cells.iter().enumerate() {
            if c.children.is_empty() {
                continue;
            }
            let s: f64 = c.children.iter().map(|&k| self.cells[k].mass).sum();
            if (s - c.mass).abs() > 1e-12 * c.mass.max(f64::MIN_POSITIVE) {
                return Err(Error::precondition(format!("children of cell {i} carry {s}, parent {}", c.mass)));
            }
            for &k in &c.children {
                let ch = &self.cells[k];
                if !(ch.diam() < c.diam()) {
                    return Err(Error::precondition(format!("cell {k} not smaller than its parent")));
                }
                if self.embedded && (ch.lo < c.lo - TOL * c.diam() || ch.hi > c.hi + TOL * c.diam()) {
                    return Err(Error::precondition(format!("cell {k} not nested in {i}")));
                }
            }
        }
        Ok(())
    }

    fn require_embedded(&self) -> Result<()> {
        if self.embedded {
            Ok(())
        } else {
            Err(Error::Unsupported("ball queries need an embedded tree".into()))
        }
    }

    /// Closed-ball mass by descent; leaves straddling the sphere are counted by
    /// their representative and reported through the boundary flag.
    pub fn ball_mass(&self, x: f64, r: f64) -> Result<MassQueryResult> {
        self.require_embedded()?;
        let (a, b) = (x - r * (1.0 + TOL), x + r * (1.0 + TOL));
        let mut mass = 0.0;
        let mut boundary = false;
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let c = &self.cells[i];
            if c.hi < a || c.lo > b {
                continue;
            }
            if c.lo >= a && c.hi <= b {
                mass += c.mass;
                continue;
            }
            if c.children.is_empty() {
                boundary = true;
                if (c.rep - x).abs() <= r * (1.0 + TOL) {
                    mass += c.mass;
                }
            } else {
                stack.extend(c.children.iter().copied());
            }
        }
        Ok(MassQueryResult { mass: mass.min(self.total_mass()), boundary })
    }

    /// Whether the cell's interval meets the closed ball `B(x, r)`.
    pub fn meets_ball(&self, i: usize, x: f64, r: f64) -> bool {
        let c = &self.cells[i];
        let rr = r * (1.0 + TOL);
        c.hi >= x - rr && c.lo <= x + rr
    }

    /// Keep the leaves whose word passes `keep`; ancestors are re-summed and
    /// cells that lose every leaf are dropped. Leaf masses are unchanged.
    pub fn restrict(&self, keep: impl Fn(&[u32]) -> bool) -> Result<MeasureTree> {
        let mut alive = vec![false; self.cells.len()];
        for i in self.leaves() {
            if keep(&self.cells[i].word) {
                let mut j = Some(i);
                while let Some(k) = j {
                    alive[k] = true;
                    j = self.cells[k].parent;
                }
            }
        }
        if !alive[0] {
            return Err(Error::EmptyMeasure);
        }
        let r = &self.cells[0];
        let mut out = if self.embedded {
            MeasureTree::new(r.lo, r.hi, 0.0)?
        } else {
            MeasureTree::new_abstract(r.diam(), 0.0)?
        };
        out.cells[0].rep = r.rep;
        let mut map = vec![usize::MAX; self.cells.len()];
        map[0] = 0;
        for level in &self.levels[1..] {
            for &i in level {
                if alive[i] {
                    let c = &self.cells[i];
                    let p = map[c.parent.unwrap()];
                    let id = out.add_child(p, c.lo, c.hi, 0.0)?;
                    out.cells[id].rep = c.rep;
                    out.cells[id].word = c.word.clone();
                    map[i] = id;
                }
            }
        }
        for i in self.leaves() {
            if alive[i] {
                out.cells[map[i]].mass = self.cells[i].mass;
            }
        }
        for d in (0..out.levels.len()).rev() {
            for k in 0..out.levels[d].len() {
                let i = out.levels[d][k];
                if !out.cells[i].children.is_empty() {
                    out.cells[i].mass = out.cells[i].children.iter().map(|&c| out.cells[c].mass).sum();
                }
            }
        }
        Ok(out)
    }

    /// Restriction to the cylinder of words starting with `prefix`.
    pub fn restrict_prefix(&self, prefix: &[u32]) -> Result<MeasureTree> {
        self.restrict(|w| w.starts_with(prefix))
    }

    /// Atoms at the leaf representatives.
    pub fn leaf_measure(&self) -> Result<AtomicMeasure> {
        self.require_embedded()?;
        let leaves: Vec<usize> = self.leaves().into_iter().filter(|&i| self.cells[i].mass > 0.0).collect();
        let xs: Vec<f64> = leaves.iter().map(|&i| self.cells[i].rep).collect();
        let ms: Vec<f64> = leaves.iter().map(|&i| self.cells[i].mass).collect();
        AtomicMeasure::on_line(&xs, ms, false)
    }

    /// Deepest cell at `level` (or above, on short branches) whose interval holds `x`.
    pub fn cell_containing(&self, x: f64, level: usize) -> Option<usize> {
        let mut cur = 0usize;
        let c = &self.cells[0];
        if x < c.lo || x > c.hi {
            return None;
        }
        while self.cells[cur].depth < level {
            let next = self.cells[cur]
                .children
                .iter()
                .copied()
                .find(|&k| x >= self.cells[k].lo && x <= self.cells[k].hi);
            match next {
                Some(k) => cur = k,
                None => return if self.cells[cur].children.is_empty() { Some(cur) } else { None },
            }
        }
        Some(cur)
    }

    /// `(C0, C1)`: worst inradius-to-diameter ratio at representatives and worst
    /// parent-to-child diameter ratio.
    pub fn moran_constants(&self) -> (f64, f64) {
        let mut c0 = f64::INFINITY;
        let mut c1: f64 = 1.0;
        for c in &self.cells {
            c0 = c0.min((c.rep - c.lo).min(c.hi - c.rep) / c.diam());
            if let Some(p) = c.parent {
                c1 = c1.max(self.cells[p].diam() / c.diam());
            }
        }
        (c0, c1)
    }

    /// Cells `E` with `diam(E) <= s < diam(parent)`; the root qualifies when `diam <= s`.
    pub fn cut(&self, s: f64) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        let s_tol = s * (1.0 + 1e-9);
        while let Some(i) = stack.pop() {
            let c = &self.cells[i];
            if c.diam() <= s_tol {
                out.push(i);
            } else if c.children.is_empty() {
                return Err(Error::Depth(format!(
                    "cell {i} of diameter {} is a leaf above the cut scale {s}",
                    c.diam()
                )));
            } else {
                stack.extend(c.children.iter().rev().copied());
            }
        }
        out.sort_by(|&a, &b| self.cells[a].lo.total_cmp(&self.cells[b].lo).then(a.cmp(&b)));
        Ok(out)
    }

    /// The collection `E_n = {E : diam(E) <= C1/(C0 2^n) < diam(parent)}`.
    pub fn moran_partition(&self, n: usize) -> Result<MoranPartition> {
        let (c0, c1) = self.moran_constants();
        if !(c0 > 0.0) {
            return Err(Error::precondition("representatives must be interior (C0 > 0)"));
        }
        let threshold = c1 / (c0 * 2f64.powi(n as i32));
        Ok(MoranPartition { level: n, threshold, cells: self.cut(threshold)? })
    }

    /// Express a cut as a partition of the leaf atoms (members are leaf-atom ids
    /// of [`Self::leaf_measure`]; each defining ball is centred at the leaf
    /// nearest the cell representative with radius `C0 diam`).
    pub fn partition_level(&self, cut: &MoranPartition, lambda: f64) -> Result<(MetricSpace, PartitionLevel)> {
        self.require_embedded()?;
        let leaves: Vec<usize> = self.leaves().into_iter().filter(|&i| self.cells[i].mass > 0.0).collect();
        let xs: Vec<f64> = leaves.iter().map(|&i| self.cells[i].rep).collect();
        let space = MetricSpace::line(&xs)?;
        let (c0, _) = self.moran_constants();
        let mut cells = Vec::new();
        for (id, &e) in cut.cells.iter().enumerate() {
            let c = &self.cells[e];
            let members: Vec<usize> =
                (0..leaves.len()).filter(|&k| xs[k] >= c.lo && xs[k] <= c.hi).collect();
            if members.is_empty() {
                continue;
            }
            let centre = *members
                .iter()
                .min_by(|&&a, &&b| (xs[a] - c.rep).abs().total_cmp(&(xs[b] - c.rep).abs()))
                .unwrap();
            cells.push(PartitionCell { id, members, ball: Ball { center: centre, radius: c0 * c.diam() } });
        }
        for (k, cell) in cells.iter_mut().enumerate() {
            cell.id = k;
        }
        Ok((space, PartitionLevel { scale: cut.threshold, lambda, cells }))
    }
}

/// `Σ μ(Q)^q` over the listed cells meeting `B(x, r)`, with `0^q = 0`.
pub fn partition_sum_cells(tree: &MeasureTree, cells: &[usize], x: f64, r: f64, q: f64) -> Result<f64> {
    let mut s = 0.0;
    for &i in cells {
        if tree.is_embedded() && !tree.meets_ball(i, x, r) {
            continue;
        }
        let m = tree.cell(i).mass;
        if m == 0.0 {
            if q < 0.0 {
                return Err(Error::domain(format!("zero-mass cell {i} with negative q")));
            }
            continue;
        }
        s += m.powf(q);
    }
    Ok(s)
}

/// `Σ μ(Q)^q` over level-`n` cells meeting `B(x, r)`.
pub fn partition_sum(tree: &MeasureTree, x: f64, r: f64, n: usize, q: f64) -> Result<f64> {
    let cells = tree.level(n)?;
    partition_sum_cells(tree, cells, x, r, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_level() -> MeasureTree {
        let mut t = MeasureTree::new(0.0, 1.0, 1.0).unwrap();
        let a = t.add_child(0, 0.0, 0.25, 0.6).unwrap();
        let b = t.add_child(0, 0.5, 1.0, 0.4).unwrap();
        t.add_child(a, 0.0, 0.1, 0.6).unwrap();
        t.add_child(b, 0.5, 0.7, 0.1).unwrap();
        t.add_child(b, 0.8, 1.0, 0.3).unwrap();
        t
    }

    #[test]
    fn words_and_levels() {
        let t = two_level();
        assert_eq!(t.max_depth(), 2);
        assert_eq!(t.cell(4).word, vec![1, 0]);
        assert_eq!(t.level(2).unwrap().len(), 3);
        t.check_invariants().unwrap();
    }

    #[test]
    fn ball_descent() {
        let t = two_level();
        let q = t.ball_mass(0.0, 0.25).unwrap();
        assert!((q.mass - 0.6).abs() < 1e-15);
        assert!(!q.boundary);
        let q = t.ball_mass(0.75, 0.1).unwrap();
        assert!(q.boundary);
    }

    #[test]
    fn restrict_resums() {
        let t = two_level().restrict_prefix(&[1]).unwrap();
        assert!((t.total_mass() - 0.4).abs() < 1e-15);
        t.check_invariants().unwrap();
        assert_eq!(two_level().restrict_prefix(&[7]).unwrap_err(), Error::EmptyMeasure);
    }

    #[test]
    fn negative_q_zero_mass() {
        let mut t = MeasureTree::new(0.0, 1.0, 1.0).unwrap();
        t.add_child(0, 0.0, 0.3, 1.0).unwrap();
        t.add_child(0, 0.6, 1.0, 0.0).unwrap();
        assert!(partition_sum(&t, 0.5, 1.0, 1, -1.0).is_err());
        assert_eq!(partition_sum(&t, 0.5, 1.0, 1, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn cut_too_fine() {
        let t = two_level();
        assert!(matches!(t.cut(1e-6), Err(Error::Depth(_))));
        assert_eq!(t.cut(10.0).unwrap(), vec![0]);
    }
}
