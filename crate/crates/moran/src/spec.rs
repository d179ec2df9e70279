use mfdm_metric::{Error, Result};

/// Branching data of a self-similar construction.
///
/// `ratios` and `weights` are the limit vectors. An optional depth-indexed
/// table overrides them level by level; the table built by
/// [`SelfSimilarSpec::with_mixing`] moves from a start vector toward the limit,
/// halving the distance at each level.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilarSpec {
    ratios: Vec<f64>,
    weights: Vec<f64>,
    table: Option<Vec<(Vec<f64>, Vec<f64>)>>,
}

fn check_vectors(ratios: &[f64], weights: &[f64]) -> Result<()> {
    if ratios.len() < 2 {
        return Err(Error::domain("branching number must be at least 2"));
    }
    if ratios.len() != weights.len() {
        return Err(Error::domain("ratios and weights differ in length"));
    }
    if ratios.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
        return Err(Error::domain("ratios must lie in (0,1)"));
    }
    if weights.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
        return Err(Error::domain("weights must lie in (0,1)"));
    }
    let s: f64 = weights.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!("weights sum to {s}, not 1")));
    }
    Ok(())
}

impl SelfSimilarSpec {
    pub fn new(ratios: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        check_vectors(&ratios, &weights)?;
        Ok(SelfSimilarSpec { ratios, weights, table: None })
    }

    /// Equal weights.
    pub fn uniform(ratios: Vec<f64>) -> Result<Self> {
        let m = ratios.len();
        Self::new(ratios, vec![1.0 / m as f64; m])
    }

    /// Depth-indexed parameters `v_n = limit + 2^{-n} (start - limit)` for `n < depth`.
    pub fn with_mixing(self, start_ratios: Vec<f64>, start_weights: Vec<f64>, depth: usize) -> Result<Self> {
        check_vectors(&start_ratios, &start_weights)?;
        if start_ratios.len() != self.ratios.len() {
            return Err(Error::domain("start vectors must match the branching number"));
        }
        let mut table = Vec::with_capacity(depth);
        for n in 0..depth {
            let t = 0.5f64.powi(n as i32);
            let mix = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(l, s)| l + t * (s - l)).collect() };
            let r = mix(&self.ratios, &start_ratios);
            let mut p = mix(&self.weights, &start_weights);
            let s: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= s);
            table.push((r, p));
        }
        Ok(SelfSimilarSpec { table: Some(table), ..self })
    }

    pub fn m(&self) -> usize {
        self.ratios.len()
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_point_dependent(&self) -> bool {
        self.table.is_some()
    }

    /// Parameters used for children of cells at depth `n`.
    pub fn params_at_depth(&self, n: usize) -> (&[f64], &[f64]) {
        match &self.table {
            Some(t) if n < t.len() => (&t[n].0, &t[n].1),
            _ => (&self.ratios, &self.weights),
        }
    }

    /// Uniform lower bound `a` on the weights over all levels.
    pub fn weight_floor(&self) -> f64 {
        let mut a = self.weights.iter().copied().fold(f64::INFINITY, f64::min);
        if let Some(t) = &self.table {
            for (_, p) in t {
                a = a.min(p.iter().copied().fold(f64::INFINITY, f64::min));
            }
        }
        a
    }
}
