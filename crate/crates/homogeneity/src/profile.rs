use rayon::prelude::*;

use crate::count::{counting_measure, Exactness, HomogeneityQuery, Prepared, DEFAULT_GAMMA};
use mfdm_measures::{AtomicMeasure, Measure};
use mfdm_metric::{Error, Point, Result};

/// Grids for a homogeneity profile; every grid is strictly decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSettings {
    pub deltas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub radii: Vec<f64>,
    pub gamma: f64,
    pub exactness: Exactness,
}

/// `start, start/2, …`, `n` values.
pub fn halving_grid(start: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| start * 0.5f64.powi(i as i32)).collect()
}

impl ProfileSettings {
    /// Eight radii `r0 2^{-i}`, six epsilons `10^{-2} 2^{-i}`, `γ = 5`.
    pub fn new(deltas: Vec<f64>, r0: f64) -> Self {
        ProfileSettings {
            deltas,
            epsilons: halving_grid(1e-2, 6),
            radii: halving_grid(r0, 8),
            gamma: DEFAULT_GAMMA,
            exactness: Exactness::Exact,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_epsilons(mut self, epsilons: Vec<f64>) -> Self {
        self.epsilons = epsilons;
        self
    }

    pub fn with_radii(mut self, radii: Vec<f64>) -> Self {
        self.radii = radii;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, g) in [("delta", &self.deltas), ("epsilon", &self.epsilons), ("r", &self.radii)] {
            if g.is_empty() {
                return Err(Error::precondition(format!("{name} grid is empty")));
            }
            if g.windows(2).any(|w| !(w[1] < w[0])) {
                return Err(Error::precondition(format!("{name} grid must be strictly decreasing")));
            }
        }
        if !(self.gamma > 1.0) {
            return Err(Error::domain("gamma must exceed 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileEntry {
    pub delta: f64,
    /// Largest count over the radius grid at the chosen epsilon.
    pub count: usize,
    pub epsilon: f64,
    /// Radius achieving `count`.
    pub r: f64,
    pub exact: bool,
    /// False when no epsilon in the grid survived halving unchanged.
    pub stable: bool,
    /// Smallest count over the radius grid (lower-homogeneity diagnostic).
    pub min_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomDimEstimate {
    pub slope: f64,
    pub residual: f64,
    /// Smallest consecutive increment `Δ log⁺ count / Δ(-log δ)`.
    pub min_inc: f64,
    pub max_inc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneityProfile {
    pub x: Point,
    pub gamma: f64,
    pub entries: Vec<ProfileEntry>,
    /// Present when the profile has at least three entries.
    pub estimate: Option<HomDimEstimate>,
}

struct RadiusSweep {
    counts: Vec<(usize, bool)>,
}

impl RadiusSweep {
    fn best(&self, radii: &[f64]) -> (usize, f64, bool) {
        let mut best = (0usize, radii[0], true);
        for (&(c, _), &r) in self.counts.iter().zip(radii) {
            if c > best.0 {
                best = (c, r, true);
            }
        }
        best.2 = self.counts.iter().all(|c| c.1);
        best
    }

    fn min(&self) -> usize {
        self.counts.iter().map(|c| c.0).min().unwrap_or(0)
    }
}

/// Prepared candidates per radius; `None` where the ball misses the support.
fn prepare_radii(m: &AtomicMeasure, x: &Point, delta: f64, s: &ProfileSettings) -> Result<Vec<Option<Prepared>>> {
    s.radii
        .par_iter()
        .map(|&r| match Prepared::new(m, x, delta, r, s.gamma) {
            Ok(p) => Ok(Some(p)),
            Err(Error::Precondition(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

fn sweep(prep: &[Option<Prepared>], eps: f64, exactness: Exactness) -> RadiusSweep {
    let counts = prep
        .par_iter()
        .map(|p| match p {
            Some(p) => {
                let h = p.count(eps, exactness);
                (h.count, h.exact)
            }
            // a ball missing the support contributes nothing
            None => (0, true),
        })
        .collect();
    RadiusSweep { counts }
}

/// `hom_δ(μ, x)` per `δ`: the largest count over the radius grid, at the first
/// epsilon (scanning down the grid) whose halving leaves that count unchanged.
pub fn hom_delta_profile_atomic(m: &AtomicMeasure, x: &Point, s: &ProfileSettings) -> Result<HomogeneityProfile> {
    s.validate()?;
    // validates delta and gamma once
    HomogeneityQuery::new(x.clone(), s.deltas[0], s.epsilons[0], s.radii[0])?.with_gamma(s.gamma)?;
    let mut entries = Vec::with_capacity(s.deltas.len());
    for &delta in &s.deltas {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::domain(format!("delta = {delta} outside (0, 1)")));
        }
        let prep = prepare_radii(m, x, delta, s)?;
        let mut chosen = None;
        for &eps in &s.epsilons {
            let here = sweep(&prep, eps, s.exactness);
            let half = sweep(&prep, eps / 2.0, s.exactness);
            let (c, r, exact) = here.best(&s.radii);
            if c == half.best(&s.radii).0 {
                chosen = Some(ProfileEntry { delta, count: c, epsilon: eps, r, exact, stable: true, min_count: here.min() });
                break;
            }
        }
        let entry = match chosen {
            Some(e) => e,
            None => {
                let eps = *s.epsilons.last().unwrap();
                let here = sweep(&prep, eps, s.exactness);
                let (c, r, exact) = here.best(&s.radii);
                ProfileEntry { delta, count: c, epsilon: eps, r, exact, stable: false, min_count: here.min() }
            }
        };
        entries.push(entry);
    }
    let mut p = HomogeneityProfile { x: x.clone(), gamma: s.gamma, entries, estimate: None };
    if p.entries.len() >= 3 {
        p.estimate = Some(dim_hom_estimate(&p)?);
    }
    Ok(p)
}

pub fn hom_delta_profile(m: &Measure, x: &Point, s: &ProfileSettings) -> Result<HomogeneityProfile> {
    hom_delta_profile_atomic(&counting_measure(m)?, x, s)
}

fn log_plus(c: usize) -> f64 {
    if c > 1 {
        (c as f64).ln()
    } else {
        0.0
    }
}

/// Least-squares slope of `log⁺ count` against `-log δ`, with the consecutive
/// increments as the finite-depth liminf diagnostic.
pub fn dim_hom_estimate(p: &HomogeneityProfile) -> Result<HomDimEstimate> {
    if p.entries.len() < 3 {
        return Err(Error::precondition("at least three profile entries are needed"));
    }
    let mut pts: Vec<(f64, f64)> = p.entries.iter().map(|e| (-e.delta.ln(), log_plus(e.count))).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::precondition("profile deltas must differ"));
    }
    let slope = sxy / sxx;
    let residual = (pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>() / n).sqrt();
    let incs: Vec<f64> = pts.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    let min_inc = incs.iter().copied().fold(f64::INFINITY, f64::min);
    let max_inc = incs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(HomDimEstimate { slope, residual, min_inc, max_inc })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(counts: &[usize]) -> HomogeneityProfile {
        let entries = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| ProfileEntry {
                delta: 0.5f64.powi(i as i32 + 1),
                count: c,
                epsilon: 1e-3,
                r: 1.0,
                exact: true,
                stable: true,
                min_count: c,
            })
            .collect();
        HomogeneityProfile { x: Point::Coords(vec![0.0]), gamma: 5.0, entries, estimate: None }
    }

    #[test]
    fn doubling_counts_have_slope_one() {
        let e = dim_hom_estimate(&profile(&[2, 4, 8, 16])).unwrap();
        assert!((e.slope - 1.0).abs() < 1e-12);
        assert!(e.residual < 1e-12);
        assert!((e.min_inc - 1.0).abs() < 1e-12);
    }

    #[test]
    fn counts_at_most_one_give_zero() {
        let e = dim_hom_estimate(&profile(&[1, 0, 1])).unwrap();
        assert_eq!(e.slope, 0.0);
    }

    #[test]
    fn short_profiles_rejected() {
        assert!(matches!(dim_hom_estimate(&profile(&[2, 4])), Err(Error::Precondition(_))));
    }

    #[test]
    fn grids_must_decrease() {
        let s = ProfileSettings::new(vec![0.25, 0.5], 1.0);
        assert!(s.validate().is_err());
        assert!(ProfileSettings::new(vec![0.5, 0.25], 1.0).validate().is_ok());
    }
}
