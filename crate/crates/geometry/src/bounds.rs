use mfdm_metric::{Error, Result};

/// `d - k + c / (-log(1 - 2ϱ))`, the upper local dimension bound for
/// `k`-porous measures in `R^d`.
pub fn kpor_bound(rho: f64, k: usize, d: usize, c: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::domain(format!("porosity {rho} outside (0, 1/2)")));
    }
    if k == 0 || k > d {
        return Err(Error::domain(format!("need 1 <= k <= d, got k = {k}, d = {d}")));
    }
    if !c.is_finite() {
        return Err(Error::domain("c must be finite"));
    }
    Ok((d - k) as f64 + c / -(1.0 - 2.0 * rho).ln())
}

/// `s - c ϱ^s`, the bound for porous measures on `s`-regular spaces.
pub fn metric_poro_bound(s: f64, rho: f64, c: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain("s must be positive"));
    }
    if !(0.0..=0.5).contains(&rho) {
        return Err(Error::domain(format!("porosity {rho} outside [0, 1/2]")));
    }
    Ok(s - c * rho.powf(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_values() {
        assert!((kpor_bound(0.45, 1, 2, 1.0).unwrap() - (1.0 + 1.0 / 10f64.ln())).abs() < 1e-12);
        assert!((kpor_bound(0.45, 1, 2, 1.0).unwrap() - 1.43430).abs() < 1e-5);
        assert!((kpor_bound(0.25, 2, 3, 1.0).unwrap() - 2.44270).abs() < 1e-5);
        assert!((metric_poro_bound(1.0, 0.5, 1.0).unwrap() - 0.5).abs() < 1e-15);
        let s = 2f64.ln() / 3f64.ln();
        // 0.25^s = 0.417006...
        assert!((metric_poro_bound(s, 0.25, 1.0).unwrap() - 0.213924).abs() < 1e-5);
        assert_eq!(metric_poro_bound(2.0, 0.0, 1.0).unwrap(), 2.0);
    }

    #[test]
    fn tends_to_codimension() {
        let mut prev = f64::INFINITY;
        for e in [1e-1, 1e-3, 1e-6, 1e-12] {
            let b = kpor_bound(0.5 - e, 1, 2, 1.0).unwrap();
            assert!(b < prev);
            prev = b;
        }
        assert!(prev - 1.0 < 0.04);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(kpor_bound(0.5, 1, 1, 1.0), Err(Error::Domain(_))));
        assert!(matches!(kpor_bound(0.0, 1, 1, 1.0), Err(Error::Domain(_))));
        assert!(matches!(kpor_bound(0.2, 3, 2, 1.0), Err(Error::Domain(_))));
        assert!(metric_poro_bound(1.0, 0.6, 1.0).is_err());
        assert!(metric_poro_bound(0.0, 0.1, 1.0).is_err());
    }
}
