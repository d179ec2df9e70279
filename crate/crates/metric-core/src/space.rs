use crate::error::{Error, Result};
use crate::sequence::SequenceSpace;

/// A query location: either a stored point or a free point of the ambient space.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Index(usize),
    Coords(Vec<f64>),
    Word(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Euclidean { dim: usize, coords: Vec<f64> },
    Sequence { seq: SequenceSpace, words: Vec<Vec<u32>> },
}

/// A finite point set with its metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    repr: Repr,
    doubling_hint: Option<u64>,
}

impl MetricSpace {
    /// Points of `R^dim`; the doubling hint defaults to `4^dim`.
    pub fn euclidean(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dimension must be positive"));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::domain(format!(
                    "point has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::domain("non-finite coordinate"));
            }
            coords.extend_from_slice(p);
        }
        Ok(MetricSpace {
            repr: Repr::Euclidean { dim, coords },
            doubling_hint: Some(4u64.saturating_pow(dim as u32)),
        })
    }

    /// Points on the real line.
    pub fn line(xs: &[f64]) -> Result<Self> {
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        Self::euclidean(1, &pts)
    }

    /// Flat coordinate buffer constructor.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::domain("coordinate buffer does not match dimension"));
        }
        Ok(MetricSpace {
            repr: Repr::Euclidean { dim, coords },
            doubling_hint: Some(4u64.saturating_pow(dim as u32)),
        })
    }

    /// Words of a sequence space, all of length `seq.depth()`. Doubling hint 3.
    pub fn sequence(seq: SequenceSpace, words: Vec<Vec<u32>>) -> Result<Self> {
        if words.iter().any(|w| w.len() != seq.depth()) {
            return Err(Error::domain("word length differs from space depth"));
        }
        Ok(MetricSpace {
            repr: Repr::Sequence { seq, words },
            doubling_hint: Some(3),
        })
    }

    pub fn with_doubling_hint(mut self, n: u64) -> Self {
        self.doubling_hint = Some(n);
        self
    }

    pub fn doubling_hint(&self) -> Option<u64> {
        self.doubling_hint
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Euclidean { dim, coords } => coords.len() / dim,
            Repr::Sequence { words, .. } => words.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Euclidean dimension, `None` for sequence spaces.
    pub fn dim(&self) -> Option<usize> {
        match &self.repr {
            Repr::Euclidean { dim, .. } => Some(*dim),
            Repr::Sequence { .. } => None,
        }
    }

    pub fn coords(&self, i: usize) -> Option<&[f64]> {
        match &self.repr {
            Repr::Euclidean { dim, coords } => Some(&coords[i * dim..(i + 1) * dim]),
            Repr::Sequence { .. } => None,
        }
    }

    pub fn word(&self, i: usize) -> Option<&[u32]> {
        match &self.repr {
            Repr::Sequence { words, .. } => Some(&words[i]),
            Repr::Euclidean { .. } => None,
        }
    }

    pub fn sequence_space(&self) -> Option<&SequenceSpace> {
        match &self.repr {
            Repr::Sequence { seq, .. } => Some(seq),
            Repr::Euclidean { .. } => None,
        }
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.repr {
            Repr::Euclidean { dim, coords } => {
                let a = &coords[i * dim..(i + 1) * dim];
                let b = &coords[j * dim..(j + 1) * dim];
                euclid(a, b)
            }
            Repr::Sequence { seq, words } => seq.dist(&words[i], &words[j]),
        }
    }

    /// Distance from stored point `i` to an arbitrary point.
    pub fn dist_to(&self, i: usize, p: &Point) -> Result<f64> {
        match (p, &self.repr) {
            (Point::Index(j), _) => Ok(self.dist(i, *j)),
            (Point::Coords(c), Repr::Euclidean { dim, coords }) if c.len() == *dim => {
                Ok(euclid(&coords[i * dim..(i + 1) * dim], c))
            }
            (Point::Word(w), Repr::Sequence { seq, words }) if w.len() == seq.depth() => {
                Ok(seq.dist(&words[i], w))
            }
            _ => Err(Error::domain("query point does not belong to this space")),
        }
    }

    /// Resolve a query point to coordinates when possible.
    pub fn point_coords(&self, p: &Point) -> Option<Vec<f64>> {
        match p {
            Point::Index(i) => self.coords(*i).map(|c| c.to_vec()),
            Point::Coords(c) => Some(c.clone()),
            Point::Word(_) => None,
        }
    }

    /// Keep only the listed points, in the given order.
    pub fn subset(&self, ids: &[usize]) -> MetricSpace {
        let repr = match &self.repr {
            Repr::Euclidean { dim, coords } => {
                let mut c = Vec::with_capacity(ids.len() * dim);
                for &i in ids {
                    c.extend_from_slice(&coords[i * dim..(i + 1) * dim]);
                }
                Repr::Euclidean { dim: *dim, coords: c }
            }
            Repr::Sequence { seq, words } => Repr::Sequence {
                seq: seq.clone(),
                words: ids.iter().map(|&i| words[i].clone()).collect(),
            },
        };
        MetricSpace { repr, doubling_hint: self.doubling_hint }
    }

    /// Closed-ball membership with the workspace-wide relative tolerance.
    pub fn in_closed_ball(&self, i: usize, centre: &Point, r: f64) -> Result<bool> {
        Ok(self.dist_to(i, centre)? <= r * (1.0 + crate::TOL))
    }

    /// Indices of stored points in the closed ball.
    pub fn ball_members(&self, centre: &Point, r: f64) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            if self.in_closed_ball(i, centre, r)? {
                out.push(i);
            }
        }
        Ok(out)
    }
}

pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// The appendix non-density space truncated at `depth`, all words materialized.
pub fn appendix_a_space(depth: usize) -> Result<MetricSpace> {
    let seq = SequenceSpace::new(depth)?;
    let words = seq.words()?;
    MetricSpace::sequence(seq, words)
}
