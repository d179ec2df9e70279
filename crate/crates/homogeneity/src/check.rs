use crate::count::counting_measure;
use crate::profile::{hom_delta_profile_atomic, ProfileSettings};
use mfdm_measures::Measure;
use mfdm_metric::{Error, Point, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MainInequalityRow {
    pub x: Point,
    pub udim: f64,
    pub dim_hom: f64,
    /// `udim > dim_hom + tol`.
    pub violates: bool,
    /// For `udim > s`: whether the largest count at the finest `δ` reaches `δ^{-m}`.
    pub count_bound: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MainInequalityReport {
    pub rows: Vec<MainInequalityRow>,
    pub tol: f64,
    pub violation_fraction: f64,
}

impl MainInequalityReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.violates).count()
    }
}

/// Compare upper local dimension estimates with fitted homogeneity dimensions
/// point by point. With exponents `(m, s)`, `0 < m < s`, points whose `udim`
/// exceeds `s` also get the count check `max_r hom_{δ,ε,r} ≥ δ^{-m}`.
pub fn check_main_inequality(
    m: &Measure,
    points: &[Point],
    udim: &[f64],
    settings: &ProfileSettings,
    exponents: Option<(f64, f64)>,
    tol: f64,
) -> Result<MainInequalityReport> {
    if points.len() != udim.len() {
        return Err(Error::precondition("one local dimension estimate per point is needed"));
    }
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some((me, se)) = exponents {
        if !(0.0 < me && me < se) {
            return Err(Error::domain("need 0 < m < s"));
        }
    }
    let atoms = counting_measure(m)?;
    let mut rows = Vec::with_capacity(points.len());
    for (x, &u) in points.iter().zip(udim) {
        let p = hom_delta_profile_atomic(&atoms, x, settings)?;
        let est = p.estimate.ok_or_else(|| Error::precondition("at least three deltas are needed"))?;
        let count_bound = exponents.and_then(|(me, se)| {
            (u > se).then(|| {
                let finest = p.entries.iter().min_by(|a, b| a.delta.total_cmp(&b.delta)).unwrap();
                finest.count as f64 >= finest.delta.powf(-me)
            })
        });
        rows.push(MainInequalityRow { x: x.clone(), udim: u, dim_hom: est.slope, violates: u > est.slope + tol, count_bound });
    }
    let violation_fraction = rows.iter().filter(|r| r.violates).count() as f64 / rows.len() as f64;
    Ok(MainInequalityReport { rows, tol, violation_fraction })
}
