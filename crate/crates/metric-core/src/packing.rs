use crate::error::{Error, Result};
use crate::space::MetricSpace;
use crate::TOL;

/// A closed ball with an explicitly stored centre and radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
}

/// Closed balls are disjoint only when the centre gap beats the radius sum.
pub fn balls_disjoint(space: &MetricSpace, a: &Ball, b: &Ball) -> bool {
    space.dist(a.center, b.center) > (a.radius + b.radius) * (1.0 + TOL)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Packing {
    pub balls: Vec<Ball>,
    /// Set when every ball has this radius.
    pub common_radius: Option<f64>,
}

impl Packing {
    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn centers(&self) -> Vec<usize> {
        self.balls.iter().map(|b| b.center).collect()
    }

    /// Pairwise disjointness plus the common-radius claim.
    pub fn is_valid(&self, space: &MetricSpace) -> bool {
        if let Some(r) = self.common_radius {
            if self.balls.iter().any(|b| b.radius != r) {
                return false;
            }
        }
        for (i, a) in self.balls.iter().enumerate() {
            for b in &self.balls[i + 1..] {
                if !balls_disjoint(space, a, b) {
                    return false;
                }
            }
        }
        true
    }
}

/// Greedy maximal `delta`-packing of the points `subset`, scanned in the given order.
pub fn maximal_packing(space: &MetricSpace, subset: &[usize], delta: f64) -> Result<Packing> {
    if subset.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(delta > 0.0) {
        return Err(Error::domain("packing radius must be positive"));
    }
    let mut balls: Vec<Ball> = Vec::new();
    for &i in subset {
        let cand = Ball { center: i, radius: delta };
        if balls.iter().all(|b| balls_disjoint(space, b, &cand)) {
            balls.push(cand);
        }
    }
    Ok(Packing { balls, common_radius: Some(delta) })
}

/// Maximal packing over every stored point.
pub fn maximal_packing_all(space: &MetricSpace, delta: f64) -> Result<Packing> {
    let all: Vec<usize> = (0..space.len()).collect();
    maximal_packing(space, &all, delta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitPackings {
    pub packings: Vec<Packing>,
    /// `(3/lambda)^{log2 N}` for the doubling hint in use.
    pub bound: f64,
}

/// Peel a family of balls whose `lambda`-shrunk copies are disjoint into packings.
pub fn split_into_packings(
    space: &MetricSpace,
    balls: &[Ball],
    lambda: f64,
    doubling: Option<u64>,
) -> Result<SplitPackings> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::domain("lambda must lie in (0,1)"));
    }
    let n = doubling
        .or(space.doubling_hint())
        .ok_or_else(|| Error::precondition("no doubling constant available"))?;
    for (i, a) in balls.iter().enumerate() {
        let sa = Ball { center: a.center, radius: lambda * a.radius };
        for b in &balls[i + 1..] {
            let sb = Ball { center: b.center, radius: lambda * b.radius };
            if !balls_disjoint(space, &sa, &sb) {
                return Err(Error::precondition(format!(
                    "shrunk balls at centres {} and {} intersect",
                    a.center, b.center
                )));
            }
        }
    }
    let common = balls.first().map(|b| b.radius).filter(|r| balls.iter().all(|b| b.radius == *r));
    let mut rest: Vec<Ball> = balls.to_vec();
    let mut packings = Vec::new();
    while !rest.is_empty() {
        let mut taken: Vec<Ball> = Vec::new();
        let mut left = Vec::new();
        for b in rest {
            if taken.iter().all(|t| balls_disjoint(space, t, &b)) {
                taken.push(b);
            } else {
                left.push(b);
            }
        }
        packings.push(Packing { balls: taken, common_radius: common });
        rest = left;
    }
    Ok(SplitPackings { packings, bound: packing_cardinality_bound(3.0 / lambda, n)? })
}

/// `gamma^{log2 N}`: how many disjoint `r`-balls fit in a `gamma r`-ball.
pub fn packing_cardinality_bound(gamma: f64, n: u64) -> Result<f64> {
    if !(gamma > 1.0) {
        return Err(Error::domain("gamma must exceed 1"));
    }
    if n < 2 {
        return Err(Error::domain("doubling constant must be at least 2"));
    }
    Ok(gamma.powf((n as f64).log2()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> MetricSpace {
        MetricSpace::line(xs).unwrap()
    }

    #[test]
    fn spread_points_all_kept() {
        let s = line(&[0.0, 1.0, 2.0]);
        let p = maximal_packing_all(&s, 0.4).unwrap();
        assert_eq!(p.centers(), vec![0, 1, 2]);
        assert!(p.is_valid(&s));
    }

    #[test]
    fn greedy_drops_conflict() {
        let s = line(&[0.0, 0.5, 1.0]);
        assert_eq!(maximal_packing_all(&s, 0.4).unwrap().centers(), vec![0, 2]);
    }

    #[test]
    fn touching_balls_conflict() {
        let s = line(&[0.0, 1.0]);
        assert_eq!(maximal_packing_all(&s, 0.5).unwrap().len(), 1);
    }

    #[test]
    fn single_point() {
        let s = line(&[3.0]);
        assert_eq!(maximal_packing_all(&s, 10.0).unwrap().len(), 1);
    }

    #[test]
    fn empty_and_bad_radius() {
        let s = line(&[0.0]);
        assert_eq!(maximal_packing(&s, &[], 1.0), Err(Error::EmptyInput));
        assert!(maximal_packing_all(&s, 0.0).is_err());
    }

    #[test]
    fn split_trivial() {
        let s = line(&[0.0, 1.0, 2.0]);
        let balls: Vec<Ball> = (0..3).map(|c| Ball { center: c, radius: 0.2 }).collect();
        let out = split_into_packings(&s, &balls, 0.9, None).unwrap();
        assert_eq!(out.packings.len(), 1);
        assert_eq!(out.packings[0].len(), 3);
    }

    #[test]
    fn split_rejects_overlap() {
        let s = line(&[0.0, 0.1]);
        let balls: Vec<Ball> = (0..2).map(|c| Ball { center: c, radius: 0.3 }).collect();
        assert!(matches!(
            split_into_packings(&s, &balls, 0.5, None),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn cardinality_bound() {
        assert_eq!(packing_cardinality_bound(2.0, 2).unwrap(), 2.0);
        assert!((packing_cardinality_bound(4.0, 4).unwrap() - 16.0).abs() < 1e-12);
        assert!((packing_cardinality_bound(3.0, 8).unwrap() - 27.0).abs() < 1e-12);
        assert!(packing_cardinality_bound(1.0, 4).is_err());
    }
}
