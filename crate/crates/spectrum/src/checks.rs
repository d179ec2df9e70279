use crate::dims::{entropy_dim_on, local_dim_ball, local_dim_partition_on, window_scales};
use crate::ladder::ladder;
use crate::tau::{tau_from, window_masses};
use mfdm_measures::Measure;
use mfdm_metric::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalMinReport {
    pub q: f64,
    pub global: f64,
    pub locals: Vec<(Vec<f64>, f64)>,
    pub min_local: f64,
    pub gap: f64,
}

/// Compare the global `τ_q` with the smallest local `τ_q(μ, x)` over the sample points.
pub fn check_global_is_min_local(
    m: &Measure,
    q: f64,
    points: &[Vec<f64>],
    r: f64,
    window: Option<(usize, usize)>,
) -> Result<GlobalMinReport> {
    if points.len() < 5 {
        return Err(Error::precondition("at least five sample points are needed"));
    }
    let l = ladder(m)?;
    let global = tau_from(&window_masses(&l, None, window)?, q)?.slope;
    let mut locals = Vec::with_capacity(points.len());
    for x in points {
        let t = tau_from(&window_masses(&l, Some((x, r)), window)?, q)?.slope;
        locals.push((x.clone(), t));
    }
    let min_local = locals.iter().map(|(_, t)| *t).fold(f64::INFINITY, f64::min);
    Ok(GlobalMinReport { q, global, locals, min_local, gap: (global - min_local).abs() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichRow {
    pub x: Vec<f64>,
    /// `dim_q` at the `q` above 1.
    pub dim_above: f64,
    /// `dim_q` at the `q` below 1.
    pub dim_below: f64,
    pub ldim: f64,
    pub udim: f64,
    pub entropy: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub q_pair: (f64, f64),
    pub tol: f64,
    pub rows: Vec<SandwichRow>,
}

impl SandwichReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Per point: `dim_{q_hi} - tol ≤ ldim ≤ udim ≤ dim_{q_lo} + tol`, and the same
/// with the entropy dimension in the middle.
///
/// `ldim`/`udim` are the smaller and larger of the fitted ball and partition
/// slopes; local `dim_q` uses the cells meeting `B(x, r)`.
pub fn check_dim_sandwich(
    m: &Measure,
    points: &[Vec<f64>],
    r: f64,
    (q_lo, q_hi): (f64, f64),
    tol: f64,
    window: Option<(usize, usize)>,
) -> Result<SandwichReport> {
    if !(q_lo < 1.0 && q_hi > 1.0) {
        return Err(Error::domain("need q_lo < 1 < q_hi"));
    }
    let l = ladder(m)?;
    let scales = window_scales(&l, window)?;
    let mut rows = Vec::with_capacity(points.len());
    for x in points {
        let wm = window_masses(&l, Some((x, r)), window)?;
        let dim_above = tau_from(&wm, q_hi)?.slope / (q_hi - 1.0);
        let dim_below = tau_from(&wm, q_lo)?.slope / (q_lo - 1.0);
        let ball = local_dim_ball(m, x, &scales)?.slope;
        let part = local_dim_partition_on(&l, x, window)?.slope;
        let entropy = entropy_dim_on(&l, x, r, window)?.slope;
        let (ldim, udim) = (ball.min(part), ball.max(part));
        let pass = dim_above - tol <= ldim
            && udim <= dim_below + tol
            && dim_above - tol <= entropy
            && entropy <= dim_below + tol;
        rows.push(SandwichRow { x: x.clone(), dim_above, dim_below, ldim, udim, entropy, pass });
    }
    Ok(SandwichReport { q_pair: (q_lo, q_hi), tol, rows })
}
