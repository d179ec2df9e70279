use mfdm_measures::{AtomicMeasure, Measure};
use mfdm_metric::{Error, Point, Result, TOL};

/// `X(x, r, V, α)` together with the half-cone `H(x, θ, α)` removed from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    /// Orthonormal basis of `V`, a `(d-k)`-dimensional subspace (may be empty).
    pub basis: Vec<Vec<f64>>,
    pub theta: Vec<f64>,
    pub alpha: f64,
    pub apex: Vec<f64>,
    pub radius: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Cone {
    pub fn new(basis: Vec<Vec<f64>>, theta: Vec<f64>, alpha: f64, apex: Vec<f64>, radius: f64) -> Result<Self> {
        let c = Cone { basis, theta, alpha, apex, radius };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.apex.len();
        if d == 0 || self.theta.len() != d || self.basis.iter().any(|v| v.len() != d) {
            return Err(Error::domain("cone vectors must share the apex dimension"));
        }
        if self.basis.len() >= d {
            return Err(Error::domain("V must have dimension d - k with k >= 1"));
        }
        for (i, u) in self.basis.iter().enumerate() {
            for (j, v) in self.basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot(u, v) - want).abs() > 1e-10 {
                    return Err(Error::domain("basis of V is not orthonormal"));
                }
            }
        }
        if (dot(&self.theta, &self.theta).sqrt() - 1.0).abs() > 1e-10 {
            return Err(Error::domain("theta must be a unit vector"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::domain("alpha must lie in (0, 1]"));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::domain("radius must be positive"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.apex.len()
    }

    pub fn k(&self) -> usize {
        self.dim() - self.basis.len()
    }

    fn offset(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.apex).map(|(a, b)| a - b).collect()
    }

    /// `y ∈ X(x, r, V, α)`: in the closed ball and `dist(y - x, V) < α|y - x|`.
    pub fn in_cone(&self, y: &[f64]) -> bool {
        let z = self.offset(y);
        let n2 = dot(&z, &z);
        if n2.sqrt() > self.radius * (1.0 + TOL) {
            return false;
        }
        let proj: f64 = self.basis.iter().map(|v| dot(&z, v).powi(2)).sum();
        (n2 - proj).max(0.0).sqrt() < self.alpha * n2.sqrt()
    }

    /// `y ∈ H(x, θ, α)`: `(y - x)·θ > α|y - x|`.
    pub fn in_half_cone(&self, y: &[f64]) -> bool {
        let z = self.offset(y);
        dot(&z, &self.theta) > self.alpha * dot(&z, &z).sqrt()
    }

    /// Apply the orthogonal matrix `rot` (rows) to `V` and `θ`, keeping the apex.
    pub fn rotated(&self, rot: &[Vec<f64>]) -> Result<Cone> {
        let apply = |v: &[f64]| rot.iter().map(|row| dot(row, v)).collect::<Vec<f64>>();
        Cone::new(
            self.basis.iter().map(|v| apply(v)).collect(),
            apply(&self.theta),
            self.alpha,
            self.apex.clone(),
            self.radius,
        )
    }
}

/// `μ(X(x, r, V, α) \ H(x, θ, α)) / μ(B(x, r))` by direct membership tests.
pub fn cone_mass_ratio_atomic(m: &AtomicMeasure, cone: &Cone) -> Result<f64> {
    cone.validate()?;
    let space = m.space();
    if space.dim() != Some(cone.dim()) {
        return Err(Error::domain("cone and measure live in different dimensions"));
    }
    let centre = Point::Coords(cone.apex.clone());
    let total = m.ball_mass(&centre, cone.radius).mass;
    if !(total > 0.0) {
        return Err(Error::precondition("B(x, r) carries no mass"));
    }
    let mut inside = 0.0;
    for i in m.ball_atoms(&centre, cone.radius) {
        let y = space.coords(i).unwrap();
        if cone.in_cone(y) && !cone.in_half_cone(y) {
            inside += m.mass(i);
        }
    }
    Ok((inside / total).clamp(0.0, 1.0))
}

pub fn cone_mass_ratio(m: &Measure, cone: &Cone) -> Result<f64> {
    cone_mass_ratio_atomic(&m.to_atomic()?, cone)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apex_is_never_inside() {
        let c = Cone::new(vec![vec![1.0, 0.0]], vec![0.0, 1.0], 1.0, vec![0.0, 0.0], 1.0).unwrap();
        assert!(!c.in_cone(&[0.0, 0.0]));
        assert!(c.in_cone(&[0.5, 0.1]));
        assert!(!c.in_cone(&[2.0, 0.0]));
        // with α = 1 the half-cone is empty
        assert!(!c.in_half_cone(&[0.0, 0.5]));
        let half = Cone { alpha: 0.5, ..c.clone() };
        assert!(half.in_half_cone(&[0.0, 0.5]));
        assert!(!half.in_half_cone(&[0.5, 0.1]));
        let m = AtomicMeasure::dirac(vec![0.0, 0.0]).unwrap();
        assert_eq!(cone_mass_ratio_atomic(&m, &c).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_cones() {
        assert!(Cone::new(vec![vec![1.0, 1.0]], vec![0.0, 1.0], 0.5, vec![0.0, 0.0], 1.0).is_err());
        assert!(Cone::new(vec![], vec![0.0, 2.0], 0.5, vec![0.0, 0.0], 1.0).is_err());
        assert!(Cone::new(vec![], vec![0.0, 1.0], 0.0, vec![0.0, 0.0], 1.0).is_err());
        assert!(Cone::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 1.0], 0.5, vec![0.0, 0.0], 1.0).is_err());
        assert_eq!(Cone::new(vec![], vec![1.0, 0.0], 0.5, vec![0.0, 0.0], 1.0).unwrap().k(), 2);
    }
}
