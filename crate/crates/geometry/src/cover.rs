use rayon::prelude::*;

use crate::porosity::{por_set, HoleDomain, PorosityQuery};
use mfdm_metric::{Error, MetricSpace, Point, Result, TOL};

/// Random frames per point when estimating porosity in `R^d`, `d >= 2`.
const COVER_FRAMES: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct PorousCover {
    pub count: usize,
    /// `(1 - 2ϱ) r`.
    pub radius: f64,
    /// `(1 - 2ϱ)^{k-d}`, the cover bound up to its constant.
    pub bound_shape: f64,
    pub centres: Vec<usize>,
    /// Smallest `por_k(A, z, r)` estimate over the points of `A`.
    pub min_porosity: f64,
    /// Whether every point reached `ϱ` (lower-bound estimates in `R^d`, `d >= 2`).
    pub porosity_holds: bool,
}

/// Greedy cover of the whole point set `A ⊂ B(x0, r)` by balls of radius
/// `(1 - 2ϱ) r` centred at points of `A`, taken in lexicographic order.
pub fn porous_cover_count(space: &MetricSpace, x0: &Point, r: f64, rho: f64, k: usize) -> Result<PorousCover> {
    let d = space.dim().ok_or_else(|| Error::Unsupported("porous covers need a Euclidean space".into()))?;
    if space.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::domain("r must be positive"));
    }
    if !(0.0..0.5).contains(&rho) {
        return Err(Error::domain(format!("porosity {rho} outside [0, 1/2)")));
    }
    if k == 0 || k > d {
        return Err(Error::domain(format!("k = {k} outside [1, {d}]")));
    }
    for i in 0..space.len() {
        if !space.in_closed_ball(i, x0, r)? {
            return Err(Error::precondition("the set must lie in B(x0, r)"));
        }
    }
    let radius = (1.0 - 2.0 * rho) * r;
    let mut order: Vec<usize> = (0..space.len()).collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (space.coords(a).unwrap(), space.coords(b).unwrap());
        ca.iter().zip(cb).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut covered = vec![false; space.len()];
    let mut centres = Vec::new();
    for &i in &order {
        if covered[i] {
            continue;
        }
        centres.push(i);
        for j in 0..space.len() {
            if !covered[j] && space.dist(i, j) <= radius * (1.0 + TOL) {
                covered[j] = true;
            }
        }
    }
    let min_porosity = (0..space.len())
        .into_par_iter()
        .map(|i| {
            let q = PorosityQuery::set(Point::Index(i), r, k).with_domain(HoleDomain::Ambient).with_frames(COVER_FRAMES);
            por_set(space, &q).map(|p| p.rho)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(PorousCover {
        count: centres.len(),
        radius,
        bound_shape: (1.0 - 2.0 * rho).powi(k as i32 - d as i32),
        centres,
        min_porosity,
        porosity_holds: min_porosity >= rho - 1e-9,
    })
}
