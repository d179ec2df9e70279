use mfdm_measures::AtomicMeasure;
use mfdm_metric::{Error, Result};

const MAX_ATOMS: u64 = 1 << 22;

/// Schedule entry: `λ_k` with `λ_k^{-1/2}` an integer, and the weight `m_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnePointStage {
    pub k: u32,
    /// `λ_k^{-1/2}`.
    pub inv_sqrt: u64,
    pub lambda: f64,
    pub m: f64,
}

#[derive(Debug, Clone)]
pub struct OnePoint {
    pub measure: AtomicMeasure,
    pub stages: Vec<OnePointStage>,
}

impl OnePointStage {
    pub fn sqrt_lambda(&self) -> f64 {
        1.0 / self.inv_sqrt as f64
    }
}

/// `λ_1 = 1/9`, `λ_{k+1}^{-1/2} = 16 λ_k^{-2}`, `m_1 = 1`,
/// `m_{k+1} = m_k λ_k^{1/2} 4^{-k}`.
///
/// This gives `λ_{k+1} = λ_k^4 / 256`, strong enough for the upper count chain
/// `Σ_{i<k} λ_i^{-1/2} ≤ 2 λ_{k-1}^{-1/2} = λ_k^{-1/8}`, and makes
/// `2^k λ_k^{-1/2} m_{k+1} / m_k = 2^{-k}` tend to 0.
pub fn one_point_schedule(stages: usize) -> Result<Vec<OnePointStage>> {
    let mut out: Vec<OnePointStage> = Vec::with_capacity(stages);
    for k in 1..=stages as u32 {
        let (inv_sqrt, m) = match out.last() {
            None => (3u64, 1.0),
            Some(p) => {
                let inv = (p.inv_sqrt as u128).pow(4) * 16;
                if inv > u64::MAX as u128 {
                    return Err(Error::Depth(format!("λ_{k}^-1/2 overflows")));
                }
                (inv as u64, p.m * p.sqrt_lambda() * 4f64.powi(-(p.k as i32)))
            }
        };
        let s = 1.0 / inv_sqrt as f64;
        out.push(OnePointStage { k, inv_sqrt, lambda: s * s, m });
    }
    Ok(out)
}

/// `μ = Σ_{k ≤ stages} μ_k` with
/// `μ_k = Σ_{i≤k} 2^{-i} λ_i^{1/2} m_k Σ_{j=1}^{λ_i^{-1/2}+1} δ_{10^{-k}(1 - jλ_i)}`.
///
/// Exact on the truncation: `hom_{λ_k/3, ε, 10^{-n}}(μ, 0) ≥ λ_k^{-1/2}` for
/// `k ≤ n ≤ stages` and small `ε`, and `hom_{2√λ_k, ε, r}(μ, 0) ≤ λ_k^{-1/8}`.
/// The exponent oscillation at 0 is a limit statement. The third stage would
/// need about `4.5·10^13` atoms, so at most two stages are built.
pub fn gallery_one_point(stages: usize) -> Result<OnePoint> {
    if stages == 0 {
        return Err(Error::domain("at least one stage is needed"));
    }
    let sched = one_point_schedule(stages)?;
    let atoms: u64 = sched.iter().map(|s| sched[..s.k as usize].iter().map(|f| f.inv_sqrt + 1).sum::<u64>()).sum();
    if atoms > MAX_ATOMS {
        return Err(Error::Depth(format!("{stages} stages need {atoms} atoms")));
    }
    let mut xs = Vec::with_capacity(atoms as usize);
    let mut ms = Vec::with_capacity(atoms as usize);
    for s in &sched {
        let scale = 10f64.powi(-(s.k as i32));
        for fam in &sched[..s.k as usize] {
            let w = 0.5f64.powi(fam.k as i32) * fam.sqrt_lambda() * s.m;
            for j in 1..=fam.inv_sqrt + 1 {
                xs.push(scale * (1.0 - j as f64 * fam.lambda));
                ms.push(w);
            }
        }
    }
    Ok(OnePoint { measure: AtomicMeasure::on_line(&xs, ms, false)?, stages: sched })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_values() {
        let s = one_point_schedule(2).unwrap();
        assert_eq!(s[0].inv_sqrt, 3);
        assert_eq!(s[1].inv_sqrt, 1296);
        assert!((s[1].m - 1.0 / 12.0).abs() < 1e-15);
        // 2 λ_2 ≤ λ_1^4
        assert!(2.0 * s[1].lambda <= s[0].lambda.powi(4));
    }

    #[test]
    fn atom_counts() {
        let p = gallery_one_point(2).unwrap();
        assert_eq!(p.measure.len(), 4 + 4 + 1297);
        assert!(matches!(gallery_one_point(3), Err(Error::Depth(_))));
    }
}
