use mfdm_metric::{Error, Result};

/// A scaling exponent read off `(log scale, log value)` pairs.
///
/// `slope` is the least-squares fit; `min_inc` and `max_inc` are the extreme
/// slopes between consecutive points and serve as liminf / limsup surrogates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub slope: f64,
    pub min_inc: f64,
    pub max_inc: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    /// Ladder levels `[n_min, n_max]` used.
    pub window: (usize, usize),
}

pub fn fit(xs: &[f64], ys: &[f64], window: (usize, usize)) -> Result<Estimate> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::precondition("a fit needs at least two scales"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::numeric("non-finite value in scaling data"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::precondition("scales must not all coincide"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let residual = (xs.iter().zip(ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    let mut min_inc = f64::INFINITY;
    let mut max_inc = f64::NEG_INFINITY;
    for k in 1..xs.len() {
        let inc = (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1]);
        min_inc = min_inc.min(inc);
        max_inc = max_inc.max(inc);
    }
    Ok(Estimate { slope, min_inc, max_inc, residual, window })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let e = fit(&xs, &ys, (0, 3)).unwrap();
        assert!((e.slope - 2.0).abs() < 1e-15);
        assert_eq!(e.min_inc, 2.0);
        assert!(e.residual < 1e-15);
    }

    #[test]
    fn increments_bracket_slope() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [0.0, 0.3, 1.5, 1.7];
        let e = fit(&xs, &ys, (0, 3)).unwrap();
        assert!(e.min_inc <= e.slope && e.slope <= e.max_inc);
    }

    #[test]
    fn degenerate() {
        assert!(fit(&[1.0], &[1.0], (0, 0)).is_err());
        assert!(fit(&[1.0, 1.0], &[1.0, 2.0], (0, 1)).is_err());
    }
}
