use crate::spec::SelfSimilarSpec;
use mfdm_measures::MeasureTree;
use mfdm_metric::{Error, Result};

/// Largest tree the builder will materialize.
pub const MAX_CELLS: usize = 1 << 22;

/// Embed the construction in `[0,1]` down to `depth` levels.
///
/// Children keep their order; the first sits at the left end of the parent,
/// the last at the right end, and the remaining length is split into equal
/// gaps. When the ratios sum to exactly 1 the children touch.
pub fn build_selfsimilar_tree(spec: &SelfSimilarSpec, depth: usize) -> Result<MeasureTree> {
    let m = spec.m();
    let cells: f64 = (0..=depth).map(|k| (m as f64).powi(k as i32)).sum();
    if cells > MAX_CELLS as f64 {
        return Err(Error::Depth(format!("depth {depth} would create {cells} cells")));
    }
    let mut log_min = 0.0;
    for n in 0..depth {
        let (r, _) = spec.params_at_depth(n);
        let sum: f64 = r.iter().sum();
        if sum > 1.0 + 1e-12 {
            return Err(Error::precondition(format!("ratios at depth {n} sum to {sum} > 1; children would overlap")));
        }
        log_min += r.iter().copied().fold(f64::INFINITY, f64::min).ln();
    }
    if log_min < f64::MIN_POSITIVE.ln() + 20.0 {
        return Err(Error::Precision(format!("leaf diameters underflow at depth {depth}")));
    }

    let mut tree = MeasureTree::new(0.0, 1.0, 1.0)?;
    let mut frontier = vec![0usize];
    for n in 0..depth {
        let (r, p) = spec.params_at_depth(n);
        let mut next = Vec::with_capacity(frontier.len() * m);
        for &cell in &frontier {
            let (lo, hi, mass) = {
                let c = tree.cell(cell);
                (c.lo, c.hi, c.mass)
            };
            let len = hi - lo;
            let gap = ((1.0 - r.iter().sum::<f64>()) * len / (m - 1) as f64).max(0.0);
            let mut at = lo;
            for i in 0..m {
                let w = r[i] * len;
                let (a, b) = if i + 1 == m { (hi - w, hi) } else { (at, at + w) };
                next.push(tree.add_child(cell, a, b, mass * p[i])?);
                at = b + gap;
            }
        }
        frontier = next;
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_layout() {
        let s = SelfSimilarSpec::uniform(vec![1.0 / 3.0; 2]).unwrap();
        let t = build_selfsimilar_tree(&s, 2).unwrap();
        let l2: Vec<(f64, f64)> = t.level(2).unwrap().iter().map(|&i| (t.cell(i).lo, t.cell(i).hi)).collect();
        let want = [(0.0, 1.0 / 9.0), (2.0 / 9.0, 1.0 / 3.0), (2.0 / 3.0, 7.0 / 9.0), (8.0 / 9.0, 1.0)];
        for (g, w) in l2.iter().zip(want) {
            assert!((g.0 - w.0).abs() < 1e-15 && (g.1 - w.1).abs() < 1e-15);
        }
    }

    #[test]
    fn overlapping_ratios_rejected() {
        let s = SelfSimilarSpec::uniform(vec![0.6, 0.6]).unwrap();
        assert!(build_selfsimilar_tree(&s, 1).is_err());
    }

    #[test]
    fn size_cap() {
        let s = SelfSimilarSpec::uniform(vec![0.1; 4]).unwrap();
        assert!(matches!(build_selfsimilar_tree(&s, 20), Err(Error::Depth(_))));
    }
}
