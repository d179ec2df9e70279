//! Finite metric spaces with packing and partition constructions.
//!
//! Two concrete spaces are provided: Euclidean point sets and the truncated
//! non-density sequence space. Balls are closed; two balls are disjoint only
//! when the distance of their centres exceeds the radius sum by a relative
//! margin of [`TOL`].

mod error;
mod packing;
mod partition;
pub mod sequence;
mod space;

pub use error::{Error, Result};
pub use packing::{
    balls_disjoint, maximal_packing, maximal_packing_all, packing_cardinality_bound,
    split_into_packings, Ball, Packing, SplitPackings,
};
pub use partition::{build_partition, PartitionCell, PartitionLevel};
pub use sequence::SequenceSpace;
pub use space::{appendix_a_space, MetricSpace, Point};

/// Relative tolerance for closed-ball membership and disjointness tests.
pub const TOL: f64 = 1e-12;

/// Check the triangle inequality on one triple with relative slack.
pub fn triangle_holds(space: &MetricSpace, i: usize, j: usize, k: usize) -> bool {
    let (a, b, c) = (space.dist(i, j), space.dist(j, k), space.dist(i, k));
    c <= (a + b) * (1.0 + TOL)
}

/// Try to cover `B(w, 2r)` by three balls of radius `r` in a sequence space.
///
/// The explicit centres from the doubling argument are tried first; when they
/// are undefined or fail, centres that differ from `w` in one position are
/// searched exhaustively. Returns the covering centres, or `None`.
pub fn doubling_cover(space: &MetricSpace, w: usize, r: f64) -> Option<Vec<Vec<u32>>> {
    let seq = space.sequence_space()?;
    let word = space.word(w)?.to_vec();
    let big = space.ball_members(&Point::Index(w), 2.0 * r).ok()?;
    let covers = |centres: &[Vec<u32>]| {
        big.iter().all(|&m| {
            centres
                .iter()
                .any(|c| seq.dist(space.word(m).unwrap(), c) <= r * (1.0 + TOL))
        })
    };
    if let Some(c) = seq.doubling_centres(&word, r) {
        if covers(&c) {
            return Some(c);
        }
    }
    let mut cands: Vec<Vec<u32>> = vec![word.clone()];
    for n in 1..=seq.depth() {
        for s in 0..=sequence::alphabet_max(n) as u32 {
            if s != word[n - 1] {
                let mut v = word.clone();
                v[n - 1] = s;
                cands.push(v);
            }
        }
    }
    let k = cands.len();
    for a in 0..k {
        if covers(&cands[a..=a]) {
            return Some(vec![cands[a].clone()]);
        }
    }
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                let trio = [cands[a].clone(), cands[b].clone(), cands[c].clone()];
                if covers(&trio) {
                    return Some(trio.to_vec());
                }
            }
        }
    }
    None
}
