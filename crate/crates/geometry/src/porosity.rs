use rayon::prelude::*;

use crate::frames::{axis_frame, random_frames};
use mfdm_measures::{AtomicMeasure, Measure};
use mfdm_metric::{Error, MetricSpace, Point, Result, TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PorosityMode {
    Set,
    Measure,
}

/// Where hole centres may sit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HoleDomain {
    /// Inside the bounding box of the support. Finite truncations otherwise
    /// always find a hole beyond their extreme points.
    #[default]
    SupportBox,
    Ambient,
}

/// Random frames tried, besides the axis frame, when `d >= 2`.
pub const DEFAULT_FRAMES: usize = 100;
const RADIAL_STEPS: usize = 64;
/// Relative shrink from a supremal hole to its witness.
const WITNESS_SHRINK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PorosityQuery {
    pub x: Point,
    pub r: f64,
    pub k: usize,
    /// Mass threshold factor; unused for sets.
    pub epsilon: f64,
    pub mode: PorosityMode,
    pub domain: HoleDomain,
    pub frames: usize,
    pub seed: u64,
}

impl PorosityQuery {
    pub fn set(x: Point, r: f64, k: usize) -> Self {
        PorosityQuery {
            x,
            r,
            k,
            epsilon: 0.0,
            mode: PorosityMode::Set,
            domain: HoleDomain::default(),
            frames: DEFAULT_FRAMES,
            seed: 0,
        }
    }

    pub fn measure(x: Point, r: f64, k: usize, epsilon: f64) -> Self {
        PorosityQuery { epsilon, mode: PorosityMode::Measure, ..Self::set(x, r, k) }
    }

    pub fn with_domain(mut self, domain: HoleDomain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_frames(mut self, frames: usize) -> Self {
        self.frames = frames;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self, space: &MetricSpace) -> Result<()> {
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::domain("r must be positive"));
        }
        match space.dim() {
            Some(d) if self.k == 0 || self.k > d => {
                return Err(Error::domain(format!("k = {} outside [1, {d}]", self.k)));
            }
            None if self.k != 1 => return Err(Error::domain("only k = 1 makes sense in a general metric space")),
            _ => {}
        }
        if self.mode == PorosityMode::Measure && !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::domain("epsilon must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hole {
    pub centre: Point,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Porosity {
    /// Largest witnessed `ϱ`.
    pub rho: f64,
    /// `k` holes of radius `ϱr`; empty when `ϱ = 0`.
    pub holes: Vec<Hole>,
    /// False when `rho` is a lower bound from a direction search.
    pub exact: bool,
    /// Every hole carries at most this mass (0 for sets).
    pub threshold: f64,
}

impl Porosity {
    fn none(threshold: f64, exact: bool) -> Self {
        Porosity { rho: 0.0, holes: Vec::new(), exact, threshold }
    }

    /// Recheck the defining conditions on the witnesses. For sets pass the
    /// uniform measure on the set.
    pub fn verify(&self, m: &AtomicMeasure, q: &PorosityQuery) -> bool {
        if self.holes.is_empty() {
            return self.rho == 0.0;
        }
        if self.holes.len() != q.k {
            return false;
        }
        let space = m.space();
        let xc = space.point_coords(&q.x);
        let bbox = support_box(m);
        let mut offsets = Vec::new();
        for h in &self.holes {
            if (h.radius - self.rho * q.r).abs() > 1e-12 * q.r {
                return false;
            }
            if m.ball_mass(&h.centre, h.radius).mass > self.threshold {
                return false;
            }
            let d = match (&xc, &h.centre) {
                (Some(x), Point::Coords(y)) => {
                    if q.domain == HoleDomain::SupportBox {
                        if let Some((lo, hi)) = &bbox {
                            if y.iter().zip(lo.iter().zip(hi)).any(|(v, (a, b))| v < a || v > b) {
                                return false;
                            }
                        }
                    }
                    offsets.push(y.iter().zip(x).map(|(a, b)| a - b).collect::<Vec<f64>>());
                    norm(offsets.last().unwrap())
                }
                (_, Point::Index(i)) => match space.dist_to(*i, &q.x) {
                    Ok(d) => d,
                    Err(_) => return false,
                },
                _ => return false,
            };
            if d + h.radius > q.r * (1.0 + TOL) {
                return false;
            }
        }
        for i in 0..offsets.len() {
            for j in i + 1..offsets.len() {
                let dot: f64 = offsets[i].iter().zip(&offsets[j]).map(|(a, b)| a * b).sum();
                if dot.abs() > 1e-9 * q.r * q.r {
                    return false;
                }
            }
        }
        true
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Bounding box of the atoms of positive mass.
fn support_box(m: &AtomicMeasure) -> Option<(Vec<f64>, Vec<f64>)> {
    let space = m.space();
    let d = space.dim()?;
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for i in (0..m.len()).filter(|&i| m.mass(i) > 0.0) {
        for (j, &c) in space.coords(i)?.iter().enumerate() {
            lo[j] = lo[j].min(c);
            hi[j] = hi[j].max(c);
        }
    }
    Some((lo, hi))
}

fn locate(space: &MetricSpace, x: &Point) -> Option<usize> {
    match x {
        Point::Index(i) => (*i < space.len()).then_some(*i),
        Point::Coords(c) => {
            let scale = c.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            (0..space.len()).find(|&i| space.dist_to(i, x).map_or(false, |d| d <= TOL * scale))
        }
        Point::Word(w) => (0..space.len()).find(|&i| space.word(i) == Some(w.as_slice())),
    }
}

/// `por_k(A, x, r)` for a finite set `A`, `x ∈ A`.
///
/// Exact on the line and in general metric spaces (hole centres at stored
/// points there); in `R^d`, `d >= 2`, a lower bound from holes along the
/// columns of the axis frame and `q.frames` random orthonormal frames.
pub fn por_set(space: &MetricSpace, q: &PorosityQuery) -> Result<Porosity> {
    q.validate(space)?;
    if space.is_empty() {
        return Err(Error::EmptyInput);
    }
    if locate(space, &q.x).is_none() {
        return Err(Error::precondition("x is not a point of the set"));
    }
    let m = AtomicMeasure::uniform(space.clone())?;
    search(&m, q, 0.0)
}

/// `por_k(μ, x, r, ε)`: holes carry at most `ε μ(B(x, r))`.
pub fn por_measure_atomic(m: &AtomicMeasure, q: &PorosityQuery) -> Result<Porosity> {
    q.validate(m.space())?;
    let mass = m.ball_mass(&q.x, q.r).mass;
    if !(mass > 0.0) {
        return Err(Error::precondition("B(x, r) carries no mass"));
    }
    search(m, q, q.epsilon * mass)
}

/// [`por_measure_atomic`] on either backend; trees use their leaf atoms.
pub fn por_measure(m: &Measure, q: &PorosityQuery) -> Result<Porosity> {
    por_measure_atomic(&m.to_atomic()?, q)
}

fn search(m: &AtomicMeasure, q: &PorosityQuery, threshold: f64) -> Result<Porosity> {
    match m.space().dim() {
        Some(1) => line_sweep(m, q, threshold),
        Some(_) => frame_search(m, q, threshold),
        None => stored_centres(m, q, threshold),
    }
}

fn centre_range(m: &AtomicMeasure, q: &PorosityQuery) -> (Vec<f64>, Vec<f64>) {
    match (q.domain, support_box(m)) {
        (HoleDomain::SupportBox, Some(b)) => b,
        _ => {
            let d = m.space().dim().unwrap_or(0);
            (vec![f64::NEG_INFINITY; d], vec![f64::INFINITY; d])
        }
    }
}

/// Windows between atoms whose interior mass stays below the threshold; the
/// best hole in each is centred as close to the window midpoint as allowed.
fn line_sweep(m: &AtomicMeasure, q: &PorosityQuery, threshold: f64) -> Result<Porosity> {
    let x = m.space().point_coords(&q.x).ok_or_else(|| Error::domain("x needs a coordinate"))?[0];
    let r = q.r;
    let (blo, bhi) = centre_range(m, q);
    let (blo, bhi) = (blo[0], bhi[0]);
    let mut atoms: Vec<(f64, f64)> = (0..m.len())
        .filter(|&i| m.mass(i) > 0.0)
        .map(|i| (m.space().coords(i).unwrap()[0], m.mass(i)))
        .filter(|a| a.0 >= x - r && a.0 <= x + r)
        .collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = atoms.len();
    let mut prefix = vec![0.0; n + 1];
    for (i, a) in atoms.iter().enumerate() {
        prefix[i + 1] = prefix[i] + a.1;
    }
    let pos = |i: isize| -> f64 {
        if i < 0 {
            f64::NEG_INFINITY
        } else if i as usize >= n {
            f64::INFINITY
        } else {
            atoms[i as usize].0
        }
    };
    // (h, y) per maximal window (a_i, a_j)
    let mut cands: Vec<(f64, f64)> = Vec::new();
    let mut j = 0usize;
    for i in -1..n as isize {
        let first = (i + 1) as usize;
        j = j.max(first);
        while j < n && prefix[j + 1] - prefix[first] <= threshold {
            j += 1;
        }
        let lo = pos(i).max(x - r);
        let hi = pos(j as isize).min(x + r);
        if !(hi > lo) {
            continue;
        }
        let y = (0.5 * (lo + hi)).clamp(blo, bhi);
        if y < lo || y > hi {
            continue;
        }
        let h = (y - lo).min(hi - y);
        if h > 0.0 {
            cands.push((h, y));
        }
    }
    cands.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));
    for (h, y) in cands {
        let hw = h * (1.0 - WITNESS_SHRINK);
        let centre = Point::Coords(vec![y]);
        if m.ball_mass(&centre, hw).mass <= threshold && (y - x).abs() + hw <= r * (1.0 + TOL) {
            return Ok(Porosity { rho: hw / r, holes: vec![Hole { centre, radius: hw }], exact: true, threshold });
        }
    }
    Ok(Porosity::none(threshold, true))
}

/// Candidate centres are the stored points of `B(x, r)`; for each, the hole
/// grows until the atoms it meets outweigh the threshold.
fn stored_centres(m: &AtomicMeasure, q: &PorosityQuery, threshold: f64) -> Result<Porosity> {
    let space = m.space();
    let r = q.r;
    let mut in_ball = Vec::new();
    for i in 0..space.len() {
        let d = space.dist_to(i, &q.x)?;
        if d <= r * (1.0 + TOL) {
            in_ball.push((i, d));
        }
    }
    let atoms: Vec<usize> = in_ball.iter().map(|a| a.0).filter(|&i| m.mass(i) > 0.0).collect();
    let mut best: Option<(f64, usize)> = None;
    for &(y, dxy) in &in_ball {
        let cap = r - dxy;
        if cap <= 0.0 || best.map_or(false, |b| cap <= b.0) {
            continue;
        }
        let mut ds: Vec<(f64, f64)> = atoms.iter().map(|&a| (space.dist(y, a), m.mass(a))).collect();
        ds.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut reach = f64::INFINITY;
        let mut acc = 0.0;
        let mut k = 0;
        while k < ds.len() {
            let d = ds[k].0;
            let mut add = 0.0;
            while k < ds.len() && ds[k].0 == d {
                add += ds[k].1;
                k += 1;
            }
            if acc + add > threshold {
                reach = d;
                break;
            }
            acc += add;
        }
        let h = (reach * (1.0 - WITNESS_SHRINK)).min(cap);
        if h > 0.0 && best.map_or(true, |b| h > b.0) && m.ball_mass(&Point::Index(y), h).mass <= threshold {
            best = Some((h, y));
        }
    }
    Ok(match best {
        Some((h, y)) => {
            Porosity { rho: h / r, holes: vec![Hole { centre: Point::Index(y), radius: h }], exact: true, threshold }
        }
        None => Porosity::none(threshold, true),
    })
}

struct Column {
    h: f64,
    centre: Vec<f64>,
}

/// Largest feasible hole along one direction, over both signs and a radial grid.
fn best_on_ray(m: &AtomicMeasure, x: &[f64], v: &[f64], r: f64, threshold: f64, bbox: &(Vec<f64>, Vec<f64>)) -> Column {
    let feasible = |y: &[f64], h: f64| m.ball_mass(&Point::Coords(y.to_vec()), h).mass <= threshold;
    let mut best = Column { h: 0.0, centre: x.to_vec() };
    let mut found = false;
    for step in 0..RADIAL_STEPS {
        let t = r * step as f64 / RADIAL_STEPS as f64;
        for sign in [1.0, -1.0] {
            if step == 0 && sign < 0.0 {
                continue;
            }
            let y: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + sign * t * b).collect();
            if y.iter().zip(bbox.0.iter().zip(&bbox.1)).any(|(c, (lo, hi))| c < lo || c > hi) {
                continue;
            }
            let dist = norm(&y.iter().zip(x).map(|(a, b)| a - b).collect::<Vec<_>>());
            let cap = r - dist;
            if cap <= best.h || (found && !feasible(&y, best.h)) {
                continue;
            }
            let h = if feasible(&y, cap) {
                cap
            } else {
                if !found && !feasible(&y, 0.0) {
                    continue;
                }
                let (mut lo, mut hi) = (best.h, cap);
                while hi - lo > 1e-9 * r {
                    let mid = 0.5 * (lo + hi);
                    if feasible(&y, mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            };
            if !found || h > best.h {
                best = Column { h, centre: y };
                found = true;
            }
        }
    }
    best
}

/// A frame supports `ϱ` when at least `k` of its directions carry a hole of
/// radius `ϱr`; any `k` frame directions are mutually orthogonal.
fn frame_search(m: &AtomicMeasure, q: &PorosityQuery, threshold: f64) -> Result<Porosity> {
    let d = m.space().dim().unwrap();
    let x = m.space().point_coords(&q.x).ok_or_else(|| Error::domain("x needs coordinates"))?;
    if x.len() != d {
        return Err(Error::domain("x has the wrong dimension"));
    }
    let bbox = centre_range(m, q);
    let mut frames = vec![axis_frame(d)];
    frames.extend(random_frames(d, q.frames, q.seed));
    let per_frame: Vec<Vec<Column>> = frames
        .par_iter()
        .map(|f| {
            let mut cols: Vec<Column> = f.iter().map(|v| best_on_ray(m, &x, v, q.r, threshold, &bbox)).collect();
            cols.sort_by(|a, b| b.h.total_cmp(&a.h));
            cols.truncate(q.k);
            cols
        })
        .collect();
    let mut best: Option<&Vec<Column>> = None;
    for cols in &per_frame {
        if best.map_or(true, |b| cols[q.k - 1].h > b[q.k - 1].h) {
            best = Some(cols);
        }
    }
    let cols = best.unwrap();
    let h = cols[q.k - 1].h;
    if !(h > 0.0) {
        return Ok(Porosity::none(threshold, false));
    }
    let holes = cols.iter().map(|c| Hole { centre: Point::Coords(c.centre.clone()), radius: h }).collect();
    Ok(Porosity { rho: h / q.r, holes, exact: false, threshold })
}
