use crate::ladder::atomic_ladder;
use mfdm_measures::AtomicMeasure;
use mfdm_metric::{Error, Point, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PackingSum {
    pub value: f64,
    /// Atom ids used as centres.
    pub centres: Vec<usize>,
    /// Upper bound `c Σ μ(Q)^q` over dyadic cells of side in `[2δ, 4δ)` meeting `B(x, r + δ)`.
    pub upper_bound: f64,
}

/// `Σ μ(B)^q` over a greedy `δ`-packing with centres in `B(x, r) ∩ spt μ`.
///
/// For `q ≥ 1` the heaviest balls are taken first; for `q < 1` atoms are
/// scanned in index order, which keeps the packing maximal.
pub fn s_q_packing(m: &AtomicMeasure, x: &Point, r: f64, delta: f64, q: f64) -> Result<PackingSum> {
    if q < 0.0 {
        return Err(Error::Unsupported("negative q needs a tree backend".into()));
    }
    if !(delta > 0.0 && r >= 0.0) {
        return Err(Error::domain("delta must be positive and r nonnegative"));
    }
    let space = m.space();
    let cands = m.ball_atoms(x, r);
    let mut weighted: Vec<(usize, f64)> =
        cands.iter().map(|&c| (c, m.ball_mass(&Point::Index(c), delta).mass)).collect();
    if q >= 1.0 {
        weighted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    }
    let sep = 2.0 * delta * (1.0 + mfdm_metric::TOL);
    let mut chosen: Vec<usize> = Vec::new();
    let mut value = 0.0;
    for (c, mass) in weighted {
        if chosen.iter().all(|&o| space.dist(o, c) > sep) {
            chosen.push(c);
            value += mass.powf(q);
        }
    }
    Ok(PackingSum { value, centres: chosen, upper_bound: packing_upper_bound(m, x, r, delta, q)? })
}

fn packing_upper_bound(m: &AtomicMeasure, x: &Point, r: f64, delta: f64, q: f64) -> Result<f64> {
    let Some(d) = m.space().dim() else {
        return Ok(f64::INFINITY);
    };
    let xc = m.space().point_coords(x).ok_or_else(|| Error::domain("centre needs coordinates"))?;
    // finest rung whose cube side is still at least 2δ
    let coarse = atomic_ladder(m, Some(0))?;
    let side0 = coarse.rungs[0].scale;
    let k = ((side0 / (2.0 * delta)).log2().floor().max(0.0) as usize).min(40);
    let l = atomic_ladder(m, Some(k))?;
    let rung = &l.rungs[k];
    let mut sum = 0.0;
    for c in &rung.cells {
        if c.mass > 0.0 && c.region.dist(&xc) <= r + delta {
            sum += c.mass.powf(q);
        }
    }
    // a δ-ball meets at most 2^d cubes, and a cube of side < 4δ meets at most
    // (3√d + 3)^d disjoint δ-balls
    let per_cube = (3.0 * (d as f64).sqrt() + 3.0).powi(d as i32);
    let spread = (2f64.powi(d as i32)).powf((q - 1.0).max(0.0));
    Ok(per_cube * spread * sum)
}
