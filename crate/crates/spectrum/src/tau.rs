use crate::fit::{fit, Estimate};
use crate::ladder::{ladder, tree_ladder, Ladder};
use mfdm_measures::{Measure, MeasureTree};
use mfdm_metric::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Tree,
    Atomic,
}

impl Backend {
    pub fn of(m: &Measure) -> Backend {
        match m {
            Measure::Tree(_) => Backend::Tree,
            Measure::Atomic(_) => Backend::Atomic,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Tree => "tree",
            Backend::Atomic => "atomic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauSample {
    pub q: f64,
    pub tau: f64,
    pub residual: f64,
    pub min_inc: f64,
    pub max_inc: f64,
    pub window: (usize, usize),
}

/// Sampled `q ↦ τ_q`, local when `centre` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCurve {
    pub samples: Vec<TauSample>,
    pub centre: Option<Vec<f64>>,
    pub radius: Option<f64>,
    pub backend: Backend,
    pub log2_doubling: f64,
}

impl SpectrumCurve {
    pub fn tau_at(&self, q: f64) -> Option<f64> {
        self.samples.iter().find(|s| (s.q - q).abs() < 1e-12).map(|s| s.tau)
    }

    /// Pairs `(p, q)` whose midpoint is also sampled and where
    /// `τ((p+q)/2) < (τ_p + τ_q)/2 - tol`.
    pub fn concavity_violations(&self, tol: f64) -> Vec<(f64, f64)> {
        let s = &self.samples;
        let mut out = Vec::new();
        for i in 0..s.len() {
            for j in i + 2..s.len() {
                let mid = 0.5 * (s[i].q + s[j].q);
                if let Some(tm) = self.tau_at(mid) {
                    if tm < 0.5 * (s[i].tau + s[j].tau) - tol {
                        out.push((s[i].q, s[j].q));
                    }
                }
            }
        }
        out
    }

    /// Samples outside `min{0,(q-1)log₂N} ≤ τ_q ≤ max{0,(q-1)log₂N}`.
    pub fn bound_violations(&self, tol: f64) -> Vec<f64> {
        self.samples
            .iter()
            .filter(|s| {
                let b = (s.q - 1.0) * self.log2_doubling;
                s.tau < b.min(0.0) - tol || s.tau > b.max(0.0) + tol
            })
            .map(|s| s.q)
            .collect()
    }
}

/// Cell masses per window rung, restricted to descendants of the cells meeting
/// the ball at the first rung. Zero-mass cells are kept.
pub(crate) struct WindowMasses {
    pub scales: Vec<f64>,
    pub masses: Vec<Vec<f64>>,
    pub diams: Vec<Vec<f64>>,
    pub window: (usize, usize),
    pub uniform: bool,
    /// Diameter the cell sizes are measured against: the root for global sums,
    /// the first window scale for local ones.
    pub anchor: f64,
}

pub(crate) fn window_masses(l: &Ladder, centre: Option<(&[f64], f64)>, window: Option<(usize, usize)>) -> Result<WindowMasses> {
    let w = window.unwrap_or_else(|| l.default_window());
    l.check_window(w)?;
    let masks = l.local_masks(centre, w);
    let mut scales = Vec::new();
    let mut masses: Vec<Vec<f64>> = Vec::new();
    let mut diams: Vec<Vec<f64>> = Vec::new();
    for (k, mask) in (w.0..=w.1).zip(&masks) {
        let r = &l.rungs[k];
        scales.push(r.scale);
        let kept: Vec<_> = r.cells.iter().zip(mask).filter(|(_, &m)| m).map(|(c, _)| c).collect();
        masses.push(kept.iter().map(|c| c.mass).collect());
        diams.push(kept.iter().map(|c| c.diam).collect());
    }
    if masses[0].iter().sum::<f64>() <= 0.0 {
        return Err(Error::EmptyMeasure);
    }
    let anchor = match centre {
        None => l.rungs[0].cells.iter().map(|c| c.diam).fold(0.0f64, f64::max),
        Some(_) => l.rungs[w.0].scale,
    };
    Ok(WindowMasses { scales, masses, diams, window: w, uniform: l.uniform, anchor })
}

fn moment(ms: &[f64], q: f64) -> Result<f64> {
    let mut s = 0.0;
    for &m in ms {
        if m > 0.0 {
            s += m.powf(q);
        } else if q < 0.0 {
            return Err(Error::domain("zero-mass cell with negative q"));
        }
    }
    Ok(s)
}

/// Root of `Σ (μ(Q)/μ(U))^q (diam Q / D)^{-τ} = 1` over the cells of one rung.
///
/// The left side is log-convex in `(q, τ)` jointly, so the root is concave in `q`;
/// at `q = 1` it is 0 because the relative masses sum to 1.
fn pressure_root(ms: &[f64], ds: &[f64], total: f64, d0: f64, q: f64) -> Result<f64> {
    let mut a = Vec::with_capacity(ms.len());
    let mut b = Vec::with_capacity(ms.len());
    for (&m, &d) in ms.iter().zip(ds) {
        if m > 0.0 {
            a.push(q * (m / total).ln());
            b.push((d / d0).ln());
        } else if q < 0.0 {
            return Err(Error::domain("zero-mass cell with negative q"));
        }
    }
    if b.iter().any(|x| !(*x < 0.0)) {
        return Err(Error::precondition("cells must be smaller than the anchor diameter"));
    }
    let g = |t: f64| {
        let terms: Vec<f64> = a.iter().zip(&b).map(|(ai, bi)| ai - t * bi).collect();
        let mx = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        mx + terms.iter().map(|v| (v - mx).exp()).sum::<f64>().ln()
    };
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let mut n = 0;
    while g(lo) > 0.0 || g(hi) < 0.0 {
        if g(lo) > 0.0 {
            lo *= 2.0;
        }
        if g(hi) < 0.0 {
            hi *= 2.0;
        }
        n += 1;
        if n > 200 {
            return Err(Error::numeric("could not bracket the pressure root"));
        }
    }
    if g(0.0) == 0.0 {
        return Ok(0.0);
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Pressure roots on every rung after the first; the finest one is the estimate.
fn tau_pressure(wm: &WindowMasses, q: f64) -> Result<Estimate> {
    let total: f64 = wm.masses[0].iter().sum();
    let d0 = wm.anchor;
    let mut taus = Vec::with_capacity(wm.masses.len() - 1);
    for (ms, ds) in wm.masses.iter().zip(&wm.diams).skip(1) {
        taus.push(pressure_root(ms, ds, total, d0, q)?);
    }
    let slope = *taus.last().unwrap();
    let min_inc = taus.iter().copied().fold(f64::INFINITY, f64::min);
    let max_inc = taus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Estimate { slope, min_inc, max_inc, residual: max_inc - min_inc, window: wm.window })
}

/// Least-squares slope of `log Σ μ(Q)^q` against `log δ_n`.
pub(crate) fn tau_lsq(wm: &WindowMasses, q: f64) -> Result<Estimate> {
    let xs: Vec<f64> = wm.scales.iter().map(|s| s.ln()).collect();
    let mut ys = Vec::with_capacity(xs.len());
    for ms in &wm.masses {
        let s = moment(ms, q)?;
        if !(s > 0.0) {
            return Err(Error::EmptyMeasure);
        }
        ys.push(s.ln());
    }
    fit(&xs, &ys, wm.window)
}

/// LSQ on rungs of one common scale; the pressure root when cell sizes within a
/// rung differ (Moran cuts of mixed-ratio trees), where cut sums carry a
/// quasi-periodic factor that breaks concavity of the fitted slope.
pub(crate) fn tau_from(wm: &WindowMasses, q: f64) -> Result<Estimate> {
    if wm.uniform {
        tau_lsq(wm, q)
    } else {
        tau_pressure(wm, q)
    }
}

fn check_q(m: &Measure, q: f64) -> Result<()> {
    if !q.is_finite() {
        return Err(Error::domain("q must be finite"));
    }
    if q < 0.0 && matches!(m, Measure::Atomic(_)) {
        return Err(Error::Unsupported("negative q needs a tree backend".into()));
    }
    Ok(())
}

/// Local `τ_q(μ, x)` on a tree: slope of `log Σ μ(Q)^q` against `log δ_n`
/// (see [`tau_from`] for mixed-ratio trees).
///
/// The sum at every rung runs over the descendants of the cells that meet
/// `B(x, r)` on the first window rung.
pub fn tau_local(tree: &MeasureTree, x: f64, r: f64, q: f64, window: Option<(usize, usize)>) -> Result<Estimate> {
    let l = tree_ladder(tree)?;
    let wm = window_masses(&l, Some((&[x], r)), window)?;
    tau_from(&wm, q)
}

/// Local `τ_q` on either backend.
pub fn tau_local_measure(m: &Measure, x: &[f64], r: f64, q: f64, window: Option<(usize, usize)>) -> Result<Estimate> {
    check_q(m, q)?;
    let l = ladder(m)?;
    let wm = window_masses(&l, Some((x, r)), window)?;
    tau_from(&wm, q)
}

/// Global `τ_q(μ)` over the whole support.
pub fn tau_global(m: &Measure, q: f64, window: Option<(usize, usize)>) -> Result<Estimate> {
    check_q(m, q)?;
    let l = ladder(m)?;
    let wm = window_masses(&l, None, window)?;
    tau_from(&wm, q)
}

/// Default q grid: `-2..4` by `0.25` on trees, `0..4` on atomic measures.
pub fn default_q_grid(backend: Backend) -> Vec<f64> {
    let start = if backend == Backend::Tree { -8 } else { 0 };
    (start..=16).map(|k| k as f64 * 0.25).collect()
}

/// Sample `τ_q` over `qs`, locally when `centre = Some((x, r))`.
pub fn spectrum_curve(
    m: &Measure,
    centre: Option<(&[f64], f64)>,
    qs: &[f64],
    window: Option<(usize, usize)>,
) -> Result<SpectrumCurve> {
    let l = ladder(m)?;
    spectrum_curve_on(&l, Backend::of(m), centre, qs, window)
}

pub fn spectrum_curve_on(
    l: &Ladder,
    backend: Backend,
    centre: Option<(&[f64], f64)>,
    qs: &[f64],
    window: Option<(usize, usize)>,
) -> Result<SpectrumCurve> {
    let wm = window_masses(l, centre, window)?;
    let mut samples = Vec::with_capacity(qs.len());
    for &q in qs {
        if q < 0.0 && backend == Backend::Atomic {
            return Err(Error::Unsupported("negative q needs a tree backend".into()));
        }
        let e = tau_from(&wm, q)?;
        samples.push(TauSample { q, tau: e.slope, residual: e.residual, min_inc: e.min_inc, max_inc: e.max_inc, window: e.window });
    }
    Ok(SpectrumCurve {
        samples,
        centre: centre.map(|(x, _)| x.to_vec()),
        radius: centre.map(|(_, r)| r),
        backend,
        log2_doubling: l.log2_doubling,
    })
}

/// `dim_q = τ_q / (q - 1)`.
pub fn dim_q(curve: &SpectrumCurve, q: f64) -> Result<f64> {
    if (q - 1.0).abs() < 1e-12 {
        return Err(Error::domain("q = 1 has no L^q dimension; use the entropy dimension"));
    }
    let t = curve.tau_at(q).ok_or_else(|| Error::domain(format!("q = {q} is not sampled")))?;
    Ok(t / (q - 1.0))
}
