use crate::tau::SpectrumCurve;
use mfdm_metric::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendrePoint {
    pub alpha: f64,
    pub f: f64,
    /// Sample `q` attaining the infimum.
    pub q: f64,
    /// The infimum sits on the first or last sample, so `α` is probably outside
    /// the range the grid can resolve.
    pub boundary: bool,
}

/// Discrete `inf_q {qα - τ_q}` over the curve samples.
pub fn legendre(curve: &SpectrumCurve, alphas: &[f64]) -> Result<Vec<LegendrePoint>> {
    let s = &curve.samples;
    if s.len() < 2 {
        return Err(Error::precondition("the Legendre transform needs at least two samples"));
    }
    let mut out = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let mut best = (f64::INFINITY, 0usize);
        for (k, t) in s.iter().enumerate() {
            let v = t.q * alpha - t.tau;
            if v < best.0 {
                best = (v, k);
            }
        }
        out.push(LegendrePoint { alpha, f: best.0, q: s[best.1].q, boundary: best.1 == 0 || best.1 + 1 == s.len() });
    }
    Ok(out)
}

/// Slopes of the sampled curve, `α` at each interior sample by central differences.
pub fn curve_alphas(curve: &SpectrumCurve) -> Vec<(f64, f64)> {
    let s = &curve.samples;
    (1..s.len().saturating_sub(1))
        .map(|k| (s[k].q, (s[k + 1].tau - s[k - 1].tau) / (s[k + 1].q - s[k - 1].q)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tau::{Backend, TauSample};

    fn curve(f: impl Fn(f64) -> f64) -> SpectrumCurve {
        let samples = (-8..=16)
            .map(|k| {
                let q = k as f64 * 0.25;
                TauSample { q, tau: f(q), residual: 0.0, min_inc: 0.0, max_inc: 0.0, window: (0, 1) }
            })
            .collect();
        SpectrumCurve { samples, centre: None, radius: None, backend: Backend::Tree, log2_doubling: 2.0 }
    }

    #[test]
    fn linear_tau_is_a_point() {
        let d = 2f64.ln() / 3f64.ln();
        let c = curve(|q| (q - 1.0) * d);
        let out = legendre(&c, &[d]).unwrap();
        assert!((out[0].f - d).abs() < 1e-12);
        // away from α = d the infimum runs to the grid edge
        let off = legendre(&c, &[d + 0.1]).unwrap();
        assert!(off[0].boundary);
    }

    #[test]
    fn tangent_at_one() {
        let c = curve(|q| -(0.7f64.powf(q) + 0.3f64.powf(q)).ln() / 3f64.ln());
        let a = (c.tau_at(1.25).unwrap() - c.tau_at(0.75).unwrap()) / 0.5;
        let out = legendre(&c, &[a]).unwrap();
        assert_eq!(out[0].q, 1.0);
        assert!((out[0].f - a).abs() < 1e-12);
        assert!(!out[0].boundary);
    }
}
