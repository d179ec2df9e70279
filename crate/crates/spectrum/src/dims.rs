use crate::fit::{fit, Estimate};
use crate::ladder::{ladder, Ladder};
use crate::tau::window_masses;
use mfdm_measures::Measure;
use mfdm_metric::{Error, Point, Result};

/// Entropy dimension over a window: extremes of
/// `Σ μ(Q) log μ(Q) / (μ(U) log δ_n)` and the slope of the entropy against `log δ_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyDim {
    pub lower: f64,
    pub upper: f64,
    pub slope: f64,
    pub window: (usize, usize),
}

pub fn entropy_dim_on(l: &Ladder, x: &[f64], r: f64, window: Option<(usize, usize)>) -> Result<EntropyDim> {
    let wm = window_masses(l, Some((x, r)), window)?;
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (s, ms) in wm.scales.iter().zip(&wm.masses) {
        let total: f64 = ms.iter().sum();
        let h: f64 = ms.iter().filter(|m| **m > 0.0).map(|m| m * m.ln()).sum::<f64>() / total;
        let ratio = h / s.ln();
        lower = lower.min(ratio);
        upper = upper.max(ratio);
        xs.push(s.ln());
        ys.push(h);
    }
    let slope = fit(&xs, &ys, wm.window)?.slope;
    Ok(EntropyDim { lower, upper, slope, window: wm.window })
}

pub fn entropy_dim(m: &Measure, x: &[f64], r: f64, window: Option<(usize, usize)>) -> Result<EntropyDim> {
    entropy_dim_on(&ladder(m)?, x, r, window)
}

/// Slope of `log μ(Q_n(x))` against `log δ_n`, `Q_n(x)` the rung-`n` cell holding `x`.
pub fn local_dim_partition_on(l: &Ladder, x: &[f64], window: Option<(usize, usize)>) -> Result<Estimate> {
    let w = window.unwrap_or_else(|| l.default_window());
    l.check_window(w)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in w.0..=w.1 {
        let c = l.cell_containing(k, x).ok_or_else(|| Error::domain(format!("no cell of rung {k} holds the point")))?;
        let m = l.rungs[k].cells[c].mass;
        if !(m > 0.0) {
            return Err(Error::EmptyMeasure);
        }
        xs.push(l.rungs[k].scale.ln());
        ys.push(m.ln());
    }
    fit(&xs, &ys, w)
}

pub fn local_dim_partition(m: &Measure, x: &[f64], window: Option<(usize, usize)>) -> Result<Estimate> {
    local_dim_partition_on(&ladder(m)?, x, window)
}

/// Slope of `log μ(B(x, r))` against `log r` over the given radii.
pub fn local_dim_ball(m: &Measure, x: &[f64], scales: &[f64]) -> Result<Estimate> {
    let p = Point::Coords(x.to_vec());
    let mut xs = Vec::with_capacity(scales.len());
    let mut ys = Vec::with_capacity(scales.len());
    for &r in scales {
        let b = m.ball_mass(&p, r)?.mass;
        if !(b > 0.0) {
            return Err(Error::domain(format!("ball of radius {r} carries no mass")));
        }
        xs.push(r.ln());
        ys.push(b.ln());
    }
    fit(&xs, &ys, (0, scales.len().saturating_sub(1)))
}

/// Rung scales inside a window, the default radii for ball estimates.
pub fn window_scales(l: &Ladder, window: Option<(usize, usize)>) -> Result<Vec<f64>> {
    let w = window.unwrap_or_else(|| l.default_window());
    l.check_window(w)?;
    Ok((w.0..=w.1).map(|k| l.rungs[k].scale).collect())
}

/// Ball, partition and entropy estimates at one point. `ldim`/`udim` fields are
/// the minimum and maximum increments; the fitted slopes are kept alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionReport {
    pub x: Vec<f64>,
    pub ldim_ball: f64,
    pub udim_ball: f64,
    pub ldim_part: f64,
    pub udim_part: f64,
    pub entropy_lower: f64,
    pub entropy_upper: f64,
    pub ball: Estimate,
    pub part: Estimate,
    pub entropy: EntropyDim,
}

pub fn dimension_report_on(
    m: &Measure,
    l: &Ladder,
    x: &[f64],
    r: f64,
    window: Option<(usize, usize)>,
) -> Result<DimensionReport> {
    let ball = local_dim_ball(m, x, &window_scales(l, window)?)?;
    let part = local_dim_partition_on(l, x, window)?;
    let entropy = entropy_dim_on(l, x, r, window)?;
    Ok(DimensionReport {
        x: x.to_vec(),
        ldim_ball: ball.min_inc,
        udim_ball: ball.max_inc,
        ldim_part: part.min_inc,
        udim_part: part.max_inc,
        entropy_lower: entropy.lower,
        entropy_upper: entropy.upper,
        ball,
        part,
        entropy,
    })
}

pub fn dimension_report(m: &Measure, x: &[f64], r: f64, window: Option<(usize, usize)>) -> Result<DimensionReport> {
    dimension_report_on(m, &ladder(m)?, x, r, window)
}
