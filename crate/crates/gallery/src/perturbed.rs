use mfdm_measures::{AtomicMeasure, MeasureTree};
use mfdm_metric::{Error, Result};

/// Bursts of at most `2^BURST_SPLIT_MAX` pieces are stored as tree children;
/// larger ones stay a single uniform leaf.
pub const BURST_SPLIT_MAX: u32 = 12;

/// Parameters of one stage: `q_k = 1 - 1/(k+1)`, `n_k = l_k = k` and the
/// minimal admissible `m_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbedStage {
    pub k: u32,
    pub q: f64,
    pub n: u32,
    pub l: u32,
    pub m: u32,
    /// Intervals entering the stage have length `2^{-start_exp}`.
    pub start_exp: u32,
    /// Smallest mass of an interval entering the stage.
    pub min_mass: f64,
    /// `k/(k+1) (1 - q_k)`.
    pub target: f64,
}

#[derive(Debug, Clone)]
pub struct PerturbedTree {
    /// Abstract tree: exact diameters and masses. Positions live in `lo`.
    pub tree: MeasureTree,
    /// Left end of every cell in `[0,1]`, rounded to double precision.
    pub lo: Vec<f64>,
    pub stages: Vec<PerturbedStage>,
    /// Intervals entering each stage.
    pub stage_cells: Vec<Vec<usize>>,
    /// Burst intervals of each stage (split or not).
    pub burst_cells: Vec<Vec<usize>>,
    /// Leaves kept as one uniform burst, with their piece exponent `m`.
    pub unsplit: Vec<(usize, u32)>,
    /// Outermost pieces kept by the last stage. Some of them touch a burst of
    /// the neighbouring interval.
    pub outer_leaves: Vec<usize>,
}

/// Left side of the designed-level inequality for an interval of mass `mu`:
/// `(m(1-q) + q log₂(2^{-l} mu)) / (M + n l + m)`.
pub fn designed_lhs(s: &PerturbedStage, m: u32, mu: f64) -> f64 {
    (m as f64 * (1.0 - s.q) + s.q * (mu.log2() - s.l as f64)) / (s.start_exp + s.n * s.l + m) as f64
}

/// Smallest `m ≥ 1` with `designed_lhs > target` for an interval of mass `mu`.
pub fn minimal_m(k: u32, start_exp: u32, mu: f64) -> Result<u32> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::domain("interval mass must lie in (0, 1]"));
    }
    let s = stage(k, start_exp, mu, 0);
    // m (a - c) > c (M + n l) - b with a = 1 - q, c = target, b = q(log₂ mu - l)
    let a = 1.0 - s.q;
    let b = s.q * (mu.log2() - s.l as f64);
    let c = s.target;
    let bound = (c * (start_exp + s.n * s.l) as f64 - b) / (a - c);
    let mut m = (bound.floor().max(0.0) as u32 + 1).max(1);
    while m > 1 && designed_lhs(&s, m - 1, mu) > c {
        m -= 1;
    }
    while designed_lhs(&s, m, mu) <= c {
        m += 1;
    }
    Ok(m)
}

fn stage(k: u32, start_exp: u32, min_mass: f64, m: u32) -> PerturbedStage {
    let q = 1.0 - 1.0 / (k as f64 + 1.0);
    PerturbedStage { k, q, n: k, l: k, m, start_exp, min_mass, target: k as f64 / (k as f64 + 1.0) * (1.0 - q) }
}

/// Zero-dimensional Cantor construction with a dense, null, one-dimensional
/// perturbation.
///
/// Stage `k` runs `l_k` two-end steps of ratio `2^{-n_k}` in every interval
/// (`2^{l_k}` subintervals of equal mass), makes the leftmost subinterval a
/// uniform burst of `2^{m_k}` pieces and keeps only the two outermost pieces
/// of length `2^{-m_k}` times their parent in the others. `m_k` is the least
/// integer satisfying the designed-level inequality for the lightest interval.
///
/// Exact per stage: the designed-level inequality. Limits: `dim_q → 1` as
/// `q ↑ 1` and bounded `hom_δ` off the perturbation. The minimal exponents
/// grow as 4, 61, 1090, so only two stages are representable: the third
/// would have to refine `2^61` burst pieces per interval and its intervals
/// would have length `2^-1169`.
pub fn gallery_q_gt_h(stages: usize) -> Result<PerturbedTree> {
    if stages == 0 {
        return Err(Error::domain("at least one stage is needed"));
    }
    let mut tree = MeasureTree::new_abstract(1.0, 1.0)?;
    let mut lo = vec![0.0f64];
    let mut frontier = vec![0usize];
    let mut infos = Vec::new();
    let mut stage_cells = Vec::new();
    let mut burst_cells = Vec::new();
    let mut unsplit = Vec::new();
    let mut outer_last = Vec::new();
    let mut start_exp = 0u32;
    for k in 1..=stages as u32 {
        if let Some(prev) = infos.last().map(|s: &PerturbedStage| s.m) {
            if prev > BURST_SPLIT_MAX {
                return Err(Error::Depth(format!(
                    "stage {k} would refine 2^{prev} burst pieces in every interval of stage {}",
                    k - 1
                )));
            }
        }
        let min_mass = frontier.iter().map(|&c| tree.cell(c).mass).fold(f64::INFINITY, f64::min);
        let m = minimal_m(k, start_exp, min_mass)?;
        let s = stage(k, start_exp, min_mass, m);
        let end_exp = start_exp + s.n * s.l + m;
        if end_exp > 1000 {
            return Err(Error::Precision(format!("stage {k} intervals of length 2^-{end_exp} underflow")));
        }
        stage_cells.push(frontier.clone());
        let mut bursts = Vec::new();
        let mut next = Vec::new();
        outer_last.clear();
        for &cell in &frontier {
            // l two-end steps
            let mut subs = vec![cell];
            for _ in 0..s.l {
                let mut deeper = Vec::with_capacity(subs.len() * 2);
                for &c in &subs {
                    let (len, mass, a) = (tree.cell(c).diam(), tree.cell(c).mass, lo[c]);
                    let w = len * 2f64.powi(-(s.n as i32));
                    deeper.push(tree.add_child(c, 0.0, w, 0.5 * mass)?);
                    lo.push(a);
                    deeper.push(tree.add_child(c, 0.0, w, 0.5 * mass)?);
                    lo.push(a + len - w);
                }
                subs = deeper;
            }
            for (i, &c) in subs.iter().enumerate() {
                let (len, mass, a) = (tree.cell(c).diam(), tree.cell(c).mass, lo[c]);
                let w = len * 2f64.powi(-(m as i32));
                if i == 0 {
                    bursts.push(c);
                    if m <= BURST_SPLIT_MAX {
                        let pieces = 1u32 << m;
                        for j in 0..pieces {
                            next.push(tree.add_child(c, 0.0, w, mass / pieces as f64)?);
                            lo.push(a + j as f64 * w);
                        }
                    } else {
                        unsplit.push((c, m));
                    }
                } else {
                    for at in [a, a + len - w] {
                        let id = tree.add_child(c, 0.0, w, 0.5 * mass)?;
                        lo.push(at);
                        next.push(id);
                        outer_last.push(id);
                    }
                }
            }
        }
        burst_cells.push(bursts);
        infos.push(s);
        frontier = next;
        start_exp = end_exp;
    }
    Ok(PerturbedTree { tree, lo, stages: infos, stage_cells, burst_cells, unsplit, outer_leaves: outer_last })
}

impl PerturbedTree {
    /// `log₂ Σ μ(J)^{q_k} / (M_k + n_k l_k + m_k)` per interval entering stage
    /// `k`, the sum running over the pieces of length `2^{-(M_k + n_k l_k + m_k)}`
    /// the stage keeps inside it. Unsplit bursts contribute `2^{m(1-q)} w^q`.
    pub fn designed_ratios(&self, k: usize) -> Result<Vec<f64>> {
        let s = self.stages.get(k.wrapping_sub(1)).ok_or_else(|| Error::Depth(format!("no stage {k}")))?;
        let denom = (s.start_exp + s.n * s.l + s.m) as f64;
        let mut out = Vec::with_capacity(self.stage_cells[k - 1].len());
        for &root in &self.stage_cells[k - 1] {
            let mut level = vec![root];
            for _ in 0..s.l {
                level = level.iter().flat_map(|&c| self.tree.cell(c).children.iter().copied()).collect();
            }
            let mut sum = 0.0;
            for &c in &level {
                let cell = self.tree.cell(c);
                if cell.children.is_empty() {
                    sum += 2f64.powf(s.m as f64 * (1.0 - s.q)) * cell.mass.powf(s.q);
                } else {
                    sum += cell.children.iter().map(|&j| self.tree.cell(j).mass.powf(s.q)).sum::<f64>();
                }
            }
            out.push(sum.log2() / denom);
        }
        Ok(out)
    }

    /// Atoms at the leaf centres; an unsplit burst becomes `2^min(m, burst_log2)`
    /// equal atoms spread over its interval.
    pub fn atoms(&self, burst_log2: u32) -> Result<AtomicMeasure> {
        let mut xs = Vec::new();
        let mut ms = Vec::new();
        let unsplit: std::collections::HashMap<usize, u32> = self.unsplit.iter().copied().collect();
        for leaf in self.tree.leaves() {
            let c = self.tree.cell(leaf);
            let len = c.diam();
            match unsplit.get(&leaf) {
                Some(&m) => {
                    let pieces = 1u64 << m.min(burst_log2);
                    let w = len / pieces as f64;
                    for j in 0..pieces {
                        xs.push(self.lo[leaf] + (j as f64 + 0.5) * w);
                        ms.push(c.mass / pieces as f64);
                    }
                }
                None => {
                    xs.push(self.lo[leaf] + 0.5 * len);
                    ms.push(c.mass);
                }
            }
        }
        AtomicMeasure::on_line(&xs, ms, false)
    }

    pub fn centre(&self, cell: usize) -> f64 {
        self.lo[cell] + 0.5 * self.tree.cell(cell).diam()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_exponent_from_the_displayed_inequality() {
        // (m/2 - 1/2) / (1 + m) > 1/4  ⇔  m > 3
        assert_eq!(minimal_m(1, 0, 1.0).unwrap(), 4);
    }

    #[test]
    fn exponents_are_minimal() {
        let p = gallery_q_gt_h(2).unwrap();
        let ms: Vec<u32> = p.stages.iter().map(|s| s.m).collect();
        assert_eq!(ms, vec![4, 61]);
        for s in &p.stages {
            assert!(designed_lhs(s, s.m, s.min_mass) > s.target);
            assert!(designed_lhs(s, s.m - 1, s.min_mass) <= s.target);
        }
    }

    #[test]
    fn third_stage_is_refused() {
        assert!(matches!(gallery_q_gt_h(3), Err(Error::Depth(_))));
    }
}
