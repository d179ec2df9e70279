use mfdm_measures::MeasureTree;
use mfdm_metric::{Error, Result};

const MAX_LEAVES: f64 = (1u64 << 22) as f64;

/// Parameters of one stage of the burst construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurstStage {
    pub k: u32,
    pub epsilon: f64,
    pub n: u32,
    pub m: u32,
    /// Leaf intervals after this stage have length `2^{-end_exp}`.
    pub end_exp: u32,
    /// `(k + Σ m_j) / Σ (n_j + m_j)` over stages `1..=k`.
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct BurstTree {
    pub tree: MeasureTree,
    pub stages: Vec<BurstStage>,
}

/// `(k + Σ_{j≤k} m_j) / Σ_{j≤k} (n_j + m_j)`.
pub fn stage_ratio(ns: &[u32], ms: &[u32]) -> f64 {
    let k = ns.len() as f64;
    let sm: u32 = ms.iter().sum();
    let sn: u32 = ns.iter().sum();
    (k + sm as f64) / (sn + sm) as f64
}

/// Zero-dimensional Cantor construction with rare uniform bursts, using
/// `ε_i = 3/i`, `m_i = i`, `n_i = i²`.
///
/// Stage `k` puts half the mass of every interval of length `L` on each end
/// interval of length `L 2^{-n_k}` (one tree level), then splits each end
/// interval into `2^{m_k}` equal dyadic pieces of equal mass (a second level).
///
/// Exact per stage: the count inequality `ratio < ε_k` and the equal-mass
/// leaves. Limits: `hom_δ ≈ 1/δ` and `τ_q = 0` for `q ∈ (0,1)`.
pub fn gallery_h_gt_q(stages: usize) -> Result<BurstTree> {
    if stages == 0 {
        return Err(Error::domain("at least one stage is needed"));
    }
    let mut info = Vec::with_capacity(stages);
    let (mut ns, mut ms) = (Vec::new(), Vec::new());
    let mut exp = 0u32;
    let mut leaves = 1f64;
    for k in 1..=stages as u32 {
        let (n, m) = (k * k, k);
        exp += n + m;
        leaves *= 2.0 * 2f64.powi(m as i32);
        ns.push(n);
        ms.push(m);
        info.push(BurstStage { k, epsilon: 3.0 / k as f64, n, m, end_exp: exp, ratio: stage_ratio(&ns, &ms) });
    }
    if exp > 48 {
        return Err(Error::Precision(format!("stage {stages} intervals of length 2^-{exp} are below double resolution")));
    }
    if leaves > MAX_LEAVES {
        return Err(Error::Depth(format!("stage {stages} has {leaves} leaves")));
    }

    let mut tree = MeasureTree::new(0.0, 1.0, 1.0)?;
    let mut frontier = vec![0usize];
    for s in &info {
        let mut next = Vec::with_capacity(frontier.len() * (2 << s.m));
        for &cell in &frontier {
            let (lo, hi, mass) = {
                let c = tree.cell(cell);
                (c.lo, c.hi, c.mass)
            };
            let w = (hi - lo) * 2f64.powi(-(s.n as i32));
            for (a, b) in [(lo, lo + w), (hi - w, hi)] {
                let end = tree.add_child(cell, a, b, 0.5 * mass)?;
                let pieces = 1u32 << s.m;
                let pw = w / pieces as f64;
                for i in 0..pieces {
                    let pa = a + i as f64 * pw;
                    let pb = if i + 1 == pieces { b } else { pa + pw };
                    next.push(tree.add_child(end, pa, pb, 0.5 * mass / pieces as f64)?);
                }
            }
        }
        frontier = next;
    }
    Ok(BurstTree { tree, stages: info })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_stage_shape() {
        let b = gallery_h_gt_q(1).unwrap();
        // root, two end intervals, two pieces each
        assert_eq!(b.tree.len(), 7);
        let leaves = b.tree.leaves();
        let lens: Vec<f64> = leaves.iter().map(|&l| b.tree.cell(l).diam()).collect();
        assert!(lens.iter().all(|&l| l == 0.25));
        assert!(leaves.iter().all(|&l| b.tree.cell(l).mass == 0.25));
    }

    #[test]
    fn stage_bookkeeping() {
        let b = gallery_h_gt_q(3).unwrap();
        assert_eq!(b.stages[2].end_exp, 1 + 1 + 4 + 2 + 9 + 3);
        assert_eq!(b.tree.leaves().len(), 4 * 8 * 16);
        assert!(gallery_h_gt_q(5).is_err());
    }
}
