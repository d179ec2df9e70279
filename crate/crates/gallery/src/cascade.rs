use mfdm_measures::{lebesgue_proxy, AtomicMeasure};
use mfdm_metric::{Error, MetricSpace, Result};

/// Cap on the atoms a cascade may create.
pub const CASCADE_MAX_ATOMS: usize = 1 << 22;

/// Point masses at the centres of all but one dyadic subcube, stage after stage.
///
/// Stage `k` splits the remaining cube `Q_{k-1}` into `2^{n_k d}` subcubes of
/// side `2^{-(n_1+…+n_k)}` and puts `2^{-n_k d} μ(Q_{k-1})` on the centre of
/// each one except the cube at the origin corner, which becomes `Q_k`. After
/// the last stage the mass of `Q_depth` sits at its centre, so the result is a
/// probability measure.
///
/// Per stage the atom masses are exact. The claims `τ_q(μ) ≤ (q-1)d` for
/// `q < 1` and `τ_q(μ, x) = 0` at almost every `x` are limits in the schedule.
pub fn gallery_dirac_cascade(schedule: &[u32], d: usize) -> Result<AtomicMeasure> {
    if schedule.is_empty() {
        return Err(Error::domain("the schedule needs at least one stage"));
    }
    if d == 0 || d > 3 {
        return Err(Error::domain(format!("dimension {d} outside 1..=3")));
    }
    if schedule.iter().any(|&n| n == 0) {
        return Err(Error::domain("every n_k must be positive"));
    }
    let total_exp: u32 = schedule.iter().sum();
    if total_exp > 50 {
        return Err(Error::Precision(format!("cube side 2^-{total_exp} is below double resolution")));
    }
    let atoms: f64 = schedule.iter().map(|&n| 2f64.powi((n as usize * d) as i32) - 1.0).sum::<f64>() + 1.0;
    if atoms > CASCADE_MAX_ATOMS as f64 {
        return Err(Error::Depth(format!("the schedule creates {atoms} atoms")));
    }

    let mut coords = Vec::with_capacity(atoms as usize * d);
    let mut masses = Vec::with_capacity(atoms as usize);
    let mut side = 1.0f64;
    let mut rest = 1.0f64;
    for &n in schedule {
        let per_axis = 1usize << n;
        let sub = side / per_axis as f64;
        let each = rest / (per_axis.pow(d as u32)) as f64;
        for cell in 1..per_axis.pow(d as u32) {
            let mut c = cell;
            for _ in 0..d {
                coords.push(((c % per_axis) as f64 + 0.5) * sub);
                c /= per_axis;
            }
            masses.push(each);
        }
        side = sub;
        rest = each;
    }
    coords.extend(std::iter::repeat(0.5 * side).take(d));
    masses.push(rest);
    AtomicMeasure::new(MetricSpace::from_flat(d, coords)?, masses, false)
}

/// A unit point mass at the origin plus `n_atoms` uniform atoms on `[0,1]`,
/// normalized.
///
/// Claims: `dim_q(μ) = 0` while `dim_q(μ, x) = 1` for `q > 1` and `x ≠ 0`; at a
/// finite grid both show up as fitted slopes of `τ_2`.
pub fn gallery_dirac_plus_lebesgue(n_atoms: usize) -> Result<AtomicMeasure> {
    if n_atoms < 2 {
        return Err(Error::domain("at least two Lebesgue atoms are needed"));
    }
    let leb = lebesgue_proxy(n_atoms, 1)?;
    Ok(AtomicMeasure::dirac(vec![0.0])?.add(&leb)?.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_stage_on_the_line() {
        let m = gallery_dirac_cascade(&[1], 1).unwrap();
        assert_eq!(m.len(), 2);
        let xs: Vec<f64> = (0..2).map(|i| m.space().coords(i).unwrap()[0]).collect();
        assert_eq!(xs, vec![0.75, 0.25]);
        assert_eq!(m.masses(), &[0.5, 0.5]);
    }

    #[test]
    fn masses_sum_to_one() {
        let m = gallery_dirac_cascade(&[1, 2, 3], 2).unwrap();
        assert_eq!(m.len(), 3 + 15 + 63 + 1);
        assert!((m.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bad_schedules() {
        assert!(gallery_dirac_cascade(&[], 1).is_err());
        assert!(gallery_dirac_cascade(&[1, 0], 1).is_err());
        assert!(matches!(gallery_dirac_cascade(&[30, 30], 1), Err(Error::Precision(_))));
        assert!(matches!(gallery_dirac_cascade(&[22, 1], 1), Err(Error::Depth(_))));
    }
}
