use crate::index::SpatialIndex;
use crate::MassQueryResult;
use mfdm_metric::{Error, MetricSpace, Point, Result};

/// Finite weighted point set. Each stored point of `space` is one atom.
#[derive(Debug, Clone)]
pub struct AtomicMeasure {
    space: MetricSpace,
    masses: Vec<f64>,
    total: f64,
    index: SpatialIndex,
}

impl AtomicMeasure {
    /// Merge coincident atoms and, when `normalize` is set, scale to total mass 1.
    pub fn new(space: MetricSpace, masses: Vec<f64>, normalize: bool) -> Result<Self> {
        if space.is_empty() {
            return Err(Error::EmptyInput);
        }
        if masses.len() != space.len() {
            return Err(Error::domain("one mass per point is required"));
        }
        if masses.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(Error::domain("atom masses must be positive and finite"));
        }
        let (space, mut masses) = dedup(space, masses);
        let mut total: f64 = masses.iter().sum();
        if normalize {
            for m in &mut masses {
                *m /= total;
            }
            total = masses.iter().sum();
        }
        let index = SpatialIndex::build(&space, &masses);
        Ok(AtomicMeasure { space, masses, total, index })
    }

    /// Atoms on the real line.
    pub fn on_line(xs: &[f64], masses: Vec<f64>, normalize: bool) -> Result<Self> {
        Self::new(MetricSpace::line(xs)?, masses, normalize)
    }

    /// Equal masses at the given points.
    pub fn uniform(space: MetricSpace) -> Result<Self> {
        let n = space.len();
        Self::new(space, vec![1.0; n], true)
    }

    /// Unit point mass.
    pub fn dirac(p: Vec<f64>) -> Result<Self> {
        let d = p.len();
        Self::new(MetricSpace::euclidean(d, &[p])?, vec![1.0], true)
    }

    pub fn space(&self) -> &MetricSpace {
        &self.space
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.masses[i]
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.total
    }

    /// Exact closed-ball mass.
    pub fn ball_mass(&self, centre: &Point, r: f64) -> MassQueryResult {
        let acc = self.index.query(&self.space, &self.masses, centre, r, false);
        MassQueryResult { mass: acc.mass.min(self.total), boundary: acc.boundary }
    }

    /// Atom indices in the closed ball, ascending.
    pub fn ball_atoms(&self, centre: &Point, r: f64) -> Vec<usize> {
        let mut m = self.index.query(&self.space, &self.masses, centre, r, true).members;
        m.sort_unstable();
        m
    }

    /// Keep the atoms accepted by `keep`; masses are left unchanged.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Result<AtomicMeasure> {
        let ids: Vec<usize> = (0..self.len()).filter(|&i| keep(i)).collect();
        if ids.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let space = self.space.subset(&ids);
        let masses: Vec<f64> = ids.iter().map(|&i| self.masses[i]).collect();
        AtomicMeasure::new(space, masses, false)
    }

    /// Restriction to an explicit list of atom ids.
    pub fn restrict_to(&self, ids: &[usize]) -> Result<AtomicMeasure> {
        let mut keep = vec![false; self.len()];
        for &i in ids {
            if i < keep.len() {
                keep[i] = true;
            }
        }
        self.restrict(|i| keep[i])
    }

    /// Sum with another measure on the same kind of space (no renormalization).
    pub fn add(&self, other: &AtomicMeasure) -> Result<AtomicMeasure> {
        let d = self.space.dim().ok_or_else(|| Error::Unsupported("sum of sequence measures".into()))?;
        if other.space.dim() != Some(d) {
            return Err(Error::domain("dimension mismatch"));
        }
        let mut pts = Vec::with_capacity(self.len() + other.len());
        let mut ms = Vec::with_capacity(self.len() + other.len());
        for m in [self, other] {
            for i in 0..m.len() {
                pts.push(m.space.coords(i).unwrap().to_vec());
                ms.push(m.masses[i]);
            }
        }
        AtomicMeasure::new(MetricSpace::euclidean(d, &pts)?, ms, false)
    }

    /// Rescale so the total mass is 1.
    pub fn normalized(&self) -> AtomicMeasure {
        let masses = self.masses.iter().map(|m| m / self.total).collect();
        AtomicMeasure::new(self.space.clone(), masses, true).expect("valid measure stays valid")
    }
}

/// Merge atoms at identical locations, keeping first-occurrence order.
fn dedup(space: MetricSpace, masses: Vec<f64>) -> (MetricSpace, Vec<f64>) {
    let n = space.len();
    let key = |i: usize| -> Vec<u64> {
        if let Some(c) = space.coords(i) {
            c.iter().map(|x| if *x == 0.0 { 0 } else { x.to_bits() }).collect()
        } else {
            space.word(i).unwrap().iter().map(|&s| s as u64).collect()
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (key(i), i));
    let mut rep = vec![usize::MAX; n];
    let mut dup = false;
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        if key(a) == key(b) {
            rep[b] = if rep[a] == usize::MAX { a } else { rep[a] };
            dup = true;
        }
    }
    if !dup {
        return (space, masses);
    }
    let mut merged = masses.clone();
    let mut ids = Vec::new();
    for i in 0..n {
        if rep[i] != usize::MAX {
            merged[rep[i]] += masses[i];
        }
    }
    for i in 0..n {
        if rep[i] == usize::MAX {
            ids.push(i);
        }
    }
    let out_m = ids.iter().map(|&i| merged[i]).collect();
    (space.subset(&ids), out_m)
}

/// Uniform atoms at the centres of a regular grid on `[0,1]^dim`, `per_axis` per side.
pub fn lebesgue_proxy(per_axis: usize, dim: usize) -> Result<AtomicMeasure> {
    if per_axis == 0 || dim == 0 {
        return Err(Error::EmptyInput);
    }
    let total = per_axis.pow(dim as u32);
    let mut coords = Vec::with_capacity(total * dim);
    for k in 0..total {
        let mut rest = k;
        for _ in 0..dim {
            coords.push(((rest % per_axis) as f64 + 0.5) / per_axis as f64);
            rest /= per_axis;
        }
    }
    AtomicMeasure::new(MetricSpace::from_flat(dim, coords)?, vec![1.0; total], true)
}
