use crate::spec::SelfSimilarSpec;
use mfdm_metric::{Error, Result};

/// `log Σ p_i^q r_i^{-τ}`, evaluated stably.
fn log_pressure(p: &[f64], r: &[f64], q: f64, tau: f64) -> f64 {
    let terms: Vec<f64> = p.iter().zip(r).map(|(pi, ri)| q * pi.ln() - tau * ri.ln()).collect();
    let mx = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    mx + terms.iter().map(|t| (t - mx).exp()).sum::<f64>().ln()
}

/// `Σ p_i^q r_i^{-τ} - 1`.
pub fn tau_residual(spec: &SelfSimilarSpec, q: f64, tau: f64) -> f64 {
    log_pressure(spec.weights(), spec.ratios(), q, tau).exp_m1()
}

/// Root of `Σ p_i^q r_i^{-τ} = 1` by bisection to `1e-12`.
///
/// The left side is strictly increasing in `τ` because every `r_i < 1`.
pub fn solve_tau(spec: &SelfSimilarSpec, q: f64) -> Result<f64> {
    if !q.is_finite() {
        return Err(Error::domain("q must be finite"));
    }
    let (p, r) = (spec.weights(), spec.ratios());
    let f = |t: f64| log_pressure(p, r, q, t);
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let mut doublings = 0;
    while f(lo) > 0.0 {
        lo *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::numeric("could not bracket tau from below"));
        }
    }
    while f(hi) < 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::numeric("could not bracket tau from above"));
        }
    }
    for _ in 0..400 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `τ'(q)` by implicit differentiation: `Σ w_i log p_i / Σ w_i log r_i` with
/// `w_i = p_i^q r_i^{-τ}`.
pub fn tau_derivative(spec: &SelfSimilarSpec, q: f64) -> Result<f64> {
    let tau = solve_tau(spec, q)?;
    let (p, r) = (spec.weights(), spec.ratios());
    let w: Vec<f64> = p.iter().zip(r).map(|(pi, ri)| (q * pi.ln() - tau * ri.ln()).exp()).collect();
    let num: f64 = w.iter().zip(p).map(|(wi, pi)| wi * pi.ln()).sum();
    let den: f64 = w.iter().zip(r).map(|(wi, ri)| wi * ri.ln()).sum();
    Ok(num / den)
}

/// Almost-everywhere local dimension `Σ p log p / Σ p log r`.
pub fn dim_formula(spec: &SelfSimilarSpec) -> f64 {
    let (p, r) = (spec.weights(), spec.ratios());
    let num: f64 = p.iter().map(|x| x * x.ln()).sum();
    let den: f64 = p.iter().zip(r).map(|(x, y)| x * y.ln()).sum();
    num / den
}

/// `(min, max)` of `log p_i / log r_i`.
pub fn alpha_range(spec: &SelfSimilarSpec) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (p, r) in spec.weights().iter().zip(spec.ratios()) {
        let a = p.ln() / r.ln();
        lo = lo.min(a);
        hi = hi.max(a);
    }
    (lo, hi)
}

/// Golden-section minimum of a convex function on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Largest `|q|` searched when the minimiser runs off to infinity.
pub const Q_CAP: f64 = 1e3;

/// Legendre transform `f(α) = inf_q {qα - τ_q}` against the exact `τ`.
///
/// Returns `(α, f(α), q*)` per grid point.
pub fn exact_spectrum(spec: &SelfSimilarSpec, alphas: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    let (amin, amax) = alpha_range(spec);
    let slack = 1e-12 * (1.0 + amax.abs());
    let mut out = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        if alpha < amin - slack || alpha > amax + slack {
            return Err(Error::domain(format!("alpha {alpha} outside [{amin}, {amax}]")));
        }
        let g = |q: f64| q * alpha - solve_tau(spec, q).unwrap_or(f64::NAN);
        // bracket the minimiser by stepping outward from q = 0
        let (mut a, mut b) = (-1.0f64, 1.0f64);
        while a > -Q_CAP && g(a) < g(a / 2.0) {
            a *= 2.0;
        }
        while b < Q_CAP && g(b) < g(b / 2.0) {
            b *= 2.0;
        }
        let (q, val) = golden_min(g, a.max(-Q_CAP), b.min(Q_CAP), 1e-9);
        if !val.is_finite() {
            return Err(Error::numeric("Legendre minimisation produced a non-finite value"));
        }
        out.push((alpha, val, q));
    }
    Ok(out)
}

/// Parametric form `(τ'(q), qτ'(q) - τ(q))` of the spectrum.
pub fn spectrum_point(spec: &SelfSimilarSpec, q: f64) -> Result<(f64, f64)> {
    let a = tau_derivative(spec, q)?;
    Ok((a, q * a - solve_tau(spec, q)?))
}
