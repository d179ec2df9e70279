use std::borrow::Cow;

use crate::mis::{greedy, max_independent, Graph};
use mfdm_measures::{AtomicMeasure, Measure};
use mfdm_metric::{Error, Point, Result};

/// Whether to run the exact search or stop at the greedy lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exactness {
    #[default]
    Exact,
    GreedyLowerBound,
}

pub const DEFAULT_GAMMA: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneityQuery {
    pub x: Point,
    pub delta: f64,
    pub epsilon: f64,
    pub r: f64,
    pub gamma: f64,
    pub exactness: Exactness,
}

impl HomogeneityQuery {
    pub fn new(x: Point, delta: f64, epsilon: f64, r: f64) -> Result<Self> {
        let q = HomogeneityQuery { x, delta, epsilon, r, gamma: DEFAULT_GAMMA, exactness: Exactness::Exact };
        q.validate()?;
        Ok(q)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        self.gamma = gamma;
        self.validate()?;
        Ok(self)
    }

    pub fn greedy(mut self) -> Self {
        self.exactness = Exactness::GreedyLowerBound;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::domain(format!("delta = {} outside (0, 1)", self.delta)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::domain("epsilon must be positive"));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::domain("r must be positive"));
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return Err(Error::domain(format!("gamma = {} must exceed 1", self.gamma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomCount {
    pub count: usize,
    /// True when `count` is the maximum; false for a greedy lower bound.
    pub exact: bool,
    /// Atom ids of the packing centres.
    pub centres: Vec<usize>,
    pub radius: f64,
    /// Every packing ball carries more than this mass.
    pub threshold: f64,
    pub greedy_count: usize,
    /// Candidates passing the mass threshold.
    pub eligible: usize,
}

impl HomCount {
    /// Recheck disjointness and the mass threshold of the returned packing.
    pub fn verify(&self, m: &AtomicMeasure, q: &HomogeneityQuery) -> bool {
        let space = m.space();
        let sep = 2.0 * self.radius * (1.0 + mfdm_metric::TOL);
        for (i, &a) in self.centres.iter().enumerate() {
            if !matches!(space.in_closed_ball(a, &q.x, q.r), Ok(true)) {
                return false;
            }
            if m.ball_mass(&Point::Index(a), self.radius).mass <= self.threshold {
                return false;
            }
            if self.centres[i + 1..].iter().any(|&b| space.dist(a, b) <= sep) {
                return false;
            }
        }
        self.centres.len() == self.count
    }
}

/// Atomic view used for counting: tree measures become their leaf atoms.
pub fn counting_measure(m: &Measure) -> Result<AtomicMeasure> {
    m.to_atomic()
}

/// Candidates of one `(x, δ, r, γ)` with their `δr`-ball masses, heaviest
/// first, and the full conflict graph. The eligible set for any `ε` is a prefix.
pub(crate) struct Prepared {
    ids: Vec<usize>,
    /// Candidates sorted by coordinates, for the clique cover.
    by_position: Vec<usize>,
    masses: Vec<f64>,
    adj: Vec<Vec<usize>>,
    reference: f64,
    radius: f64,
}

impl Prepared {
    pub(crate) fn new(m: &AtomicMeasure, x: &Point, delta: f64, r: f64, gamma: f64) -> Result<Self> {
        let cands = m.ball_atoms(x, r);
        if cands.is_empty() {
            return Err(Error::precondition("the support does not meet B(x, r)"));
        }
        let radius = delta * r;
        let reference = m.ball_mass(x, gamma * r).mass;
        let mut weighted: Vec<(usize, f64)> =
            cands.into_iter().map(|c| (c, m.ball_mass(&Point::Index(c), radius).mass)).collect();
        weighted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let ids: Vec<usize> = weighted.iter().map(|e| e.0).collect();
        let masses = weighted.iter().map(|e| e.1).collect();
        let mut pos = vec![usize::MAX; m.len()];
        for (k, &id) in ids.iter().enumerate() {
            pos[id] = k;
        }
        // two δr-balls meet when their centres are at most 2δr apart
        let adj = ids
            .iter()
            .enumerate()
            .map(|(k, &id)| {
                let mut a: Vec<usize> = m
                    .ball_atoms(&Point::Index(id), 2.0 * radius)
                    .into_iter()
                    .map(|w| pos[w])
                    .filter(|&j| j != usize::MAX && j != k)
                    .collect();
                a.shrink_to_fit();
                a
            })
            .collect();
        let mut by_position: Vec<usize> = (0..ids.len()).collect();
        if m.space().dim().is_some() {
            let key = |k: usize| m.space().coords(ids[k]).unwrap();
            by_position.sort_by(|&a, &b| {
                key(a).iter().zip(key(b)).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
            });
        }
        Ok(Prepared { ids, by_position, masses, adj, reference, radius })
    }

    pub(crate) fn count(&self, epsilon: f64, exactness: Exactness) -> HomCount {
        let threshold = epsilon * self.reference;
        let l = self.masses.partition_point(|&b| b > threshold);
        let radius = self.radius;
        if l == 0 {
            return HomCount { count: 0, exact: true, centres: vec![], radius, threshold, greedy_count: 0, eligible: 0 };
        }
        let g = if l == self.adj.len() {
            Graph { adj: Cow::Borrowed(&self.adj) }
        } else {
            Graph { adj: Cow::Owned(self.adj[..l].iter().map(|a| a.iter().copied().filter(|&j| j < l).collect()).collect()) }
        };
        let order: Vec<usize> = (0..l).collect();
        let greedy_set = greedy(&g, &order);
        let greedy_count = greedy_set.len();
        let sol = match exactness {
            Exactness::Exact => {
                let cover: Vec<usize> = self.by_position.iter().copied().filter(|&k| k < l).collect();
                max_independent(&g, &order, &cover)
            }
            Exactness::GreedyLowerBound => crate::mis::Solution { set: greedy_set, exact: false },
        };
        let mut centres: Vec<usize> = sol.set.iter().map(|&k| self.ids[k]).collect();
        centres.sort_unstable();
        HomCount { count: centres.len(), exact: sol.exact, centres, radius, threshold, greedy_count, eligible: l }
    }
}

/// `hom^γ_{δ,ε,r}(μ, x)` on a finite atomic measure.
///
/// Packing centres are support atoms inside `B(x, r)`; the search is exact
/// when every component of the reduced conflict graph has at most
/// [`EXACT_CUTOFF`](crate::EXACT_CUTOFF) vertices, otherwise greedy by
/// descending ball mass.
pub fn hom_count_atomic(m: &AtomicMeasure, q: &HomogeneityQuery) -> Result<HomCount> {
    q.validate()?;
    Ok(Prepared::new(m, &q.x, q.delta, q.r, q.gamma)?.count(q.epsilon, q.exactness))
}

/// `hom^γ_{δ,ε,r}(μ, x)` on either backend.
pub fn hom_count(m: &Measure, q: &HomogeneityQuery) -> Result<HomCount> {
    hom_count_atomic(&counting_measure(m)?, q)
}
