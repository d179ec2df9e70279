use crate::bounds::kpor_bound;
use crate::porosity::{por_measure, PorosityQuery};
use mfdm_measures::Measure;
use mfdm_metric::{Error, Point, Result};
use mfdm_spectrum::dimension_report;

#[derive(Debug, Clone)]
pub struct TradeoffMember {
    pub label: String,
    pub measure: Measure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffSettings {
    pub x: Vec<f64>,
    pub r: f64,
    pub epsilon: f64,
    pub k: usize,
    /// Radius handed to the dimension estimators.
    pub dim_radius: f64,
}

impl Default for TradeoffSettings {
    fn default() -> Self {
        TradeoffSettings { x: vec![0.0], r: 1.0, epsilon: 1e-6, k: 1, dim_radius: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffRow {
    pub label: String,
    pub rho: f64,
    pub udim: f64,
    /// Smallest `c` with `udim <= d - k + c / (-log(1 - 2ϱ))`.
    pub c_needed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffReport {
    /// Sorted by `rho`.
    pub rows: Vec<TradeoffRow>,
    pub d: usize,
    pub k: usize,
    /// Constant fitted on the two extreme members.
    pub c_fit: f64,
    /// Dimension strictly decreasing in `rho`.
    pub decreasing: bool,
    /// Every inner member lies under the bound with `c_fit`.
    pub middle_ok: bool,
}

impl TradeoffReport {
    pub fn passes(&self) -> bool {
        self.decreasing && self.middle_ok
    }
}

/// Larger of the fitted ball and partition slopes at `x`.
pub fn udim_estimate(m: &Measure, x: &[f64], r: f64) -> Result<f64> {
    let rep = dimension_report(m, x, r, None)?;
    Ok(rep.ball.slope.max(rep.part.slope))
}

fn ambient_dim(m: &Measure) -> Result<usize> {
    match m {
        Measure::Tree(_) => Ok(1),
        Measure::Atomic(a) => a.space().dim().ok_or_else(|| Error::Unsupported("needs a Euclidean measure".into())),
    }
}

/// Porosity and upper local dimension per member, and whether the porosity
/// bound with a constant fitted on the extremes covers the members between.
pub fn check_porosity_dimension_tradeoff(members: &[TradeoffMember], s: &TradeoffSettings) -> Result<TradeoffReport> {
    if members.len() < 3 {
        return Err(Error::precondition("the family needs at least three members"));
    }
    let d = ambient_dim(&members[0].measure)?;
    let mut rows = Vec::with_capacity(members.len());
    for mem in members {
        if ambient_dim(&mem.measure)? != d {
            return Err(Error::precondition("family members live in different dimensions"));
        }
        let q = PorosityQuery::measure(Point::Coords(s.x.clone()), s.r, s.k, s.epsilon);
        let rho = por_measure(&mem.measure, &q)?.rho;
        if !(rho > 0.0 && rho < 0.5) {
            return Err(Error::precondition(format!("{}: porosity {rho} outside (0, 1/2)", mem.label)));
        }
        let udim = udim_estimate(&mem.measure, &s.x, s.dim_radius)?;
        let c_needed = (udim - (d - s.k) as f64) * -(1.0 - 2.0 * rho).ln();
        rows.push(TradeoffRow { label: mem.label.clone(), rho, udim, c_needed });
    }
    rows.sort_by(|a, b| a.rho.total_cmp(&b.rho));
    let decreasing = rows.windows(2).all(|w| w[1].udim < w[0].udim);
    let c_fit = rows[0].c_needed.max(rows[rows.len() - 1].c_needed);
    let mut middle_ok = true;
    for row in &rows[1..rows.len() - 1] {
        middle_ok &= row.udim <= kpor_bound(row.rho, s.k, d, c_fit)? + 1e-12;
    }
    Ok(TradeoffReport { rows, d, k: s.k, c_fit, decreasing, middle_ok })
}
