use mfdm_measures::AtomicMeasure;
use mfdm_metric::{Error, MetricSpace, Result};

/// Atoms per ring so that a packing ball of radius `δ_min r`, `r ≈ 2^{-k}`,
/// holds at least eight atoms: arc spacing `h = δ_min 2^{-k} / 4`.
pub fn ring_atoms_for(delta_min: f64) -> Result<usize> {
    if !(delta_min > 0.0 && delta_min < 1.0) {
        return Err(Error::domain("delta_min must lie in (0, 1)"));
    }
    Ok((8.0 * std::f64::consts::PI / delta_min).ceil() as usize)
}

/// `μ = Σ_{k ≤ rings} (1/k!) 𝓗¹|S¹(0, 2^{-k})` with every circle replaced by
/// `atoms_per_ring` equal atoms at equally spaced angles. Ring `k` carries its
/// length measure, `2π 2^{-k} / k!`.
///
/// Limit claim: at the origin `dim_hom` is 1 for `γ = 3/2` and 0 for `γ = 5/2`.
pub fn gallery_ring_measure(rings: usize, atoms_per_ring: usize) -> Result<AtomicMeasure> {
    if rings == 0 || rings > 40 {
        return Err(Error::domain(format!("ring count {rings} outside 1..=40")));
    }
    if atoms_per_ring < 3 {
        return Err(Error::domain("at least three atoms per ring are needed"));
    }
    let mut coords = Vec::with_capacity(2 * rings * atoms_per_ring);
    let mut masses = Vec::with_capacity(rings * atoms_per_ring);
    let mut fact = 1.0f64;
    for k in 1..=rings {
        fact *= k as f64;
        let radius = 0.5f64.powi(k as i32);
        let each = 2.0 * std::f64::consts::PI * radius / fact / atoms_per_ring as f64;
        for j in 0..atoms_per_ring {
            let t = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / atoms_per_ring as f64;
            coords.push(radius * t.cos());
            coords.push(radius * t.sin());
            masses.push(each);
        }
    }
    AtomicMeasure::new(MetricSpace::from_flat(2, coords)?, masses, false)
}
