//! Range structures for closed-ball mass queries on atoms.

use mfdm_metric::{MetricSpace, Point, TOL};

/// Fraction of the radius treated as "on the sphere" for boundary flags.
pub const SHELL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub(crate) enum SpatialIndex {
    /// Sorted positions with prefix sums of masses.
    Line { order: Vec<usize>, xs: Vec<f64>, prefix: Vec<f64> },
    Kd(KdTree),
    Scan,
}

#[derive(Debug, Clone)]
struct KdNode {
    lo: Vec<f64>,
    hi: Vec<f64>,
    mass: f64,
    /// Range into `KdTree::perm` for leaves; children otherwise.
    start: usize,
    end: usize,
    left: Option<usize>,
    right: Option<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct KdTree {
    nodes: Vec<KdNode>,
    perm: Vec<usize>,
}

const LEAF: usize = 16;

impl KdTree {
    fn build(space: &MetricSpace, masses: &[f64]) -> KdTree {
        let mut perm: Vec<usize> = (0..space.len()).collect();
        let mut nodes = Vec::new();
        let n = perm.len();
        Self::build_rec(space, masses, &mut perm, 0, n, &mut nodes);
        KdTree { nodes, perm }
    }

    fn build_rec(
        space: &MetricSpace,
        masses: &[f64],
        perm: &mut [usize],
        start: usize,
        end: usize,
        nodes: &mut Vec<KdNode>,
    ) -> usize {
        let d = space.dim().unwrap();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        let mut mass = 0.0;
        for &i in &perm[start..end] {
            let c = space.coords(i).unwrap();
            for k in 0..d {
                lo[k] = lo[k].min(c[k]);
                hi[k] = hi[k].max(c[k]);
            }
            mass += masses[i];
        }
        let id = nodes.len();
        nodes.push(KdNode { lo: lo.clone(), hi: hi.clone(), mass, start, end, left: None, right: None });
        if end - start > LEAF {
            let axis = (0..d)
                .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
                .unwrap();
            let mid = (start + end) / 2;
            perm[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
                space.coords(a).unwrap()[axis].total_cmp(&space.coords(b).unwrap()[axis])
            });
            let l = Self::build_rec(space, masses, perm, start, mid, nodes);
            let r = Self::build_rec(space, masses, perm, mid, end, nodes);
            nodes[id].left = Some(l);
            nodes[id].right = Some(r);
        }
        id
    }

    fn near_far(node: &KdNode, x: &[f64]) -> (f64, f64) {
        let mut near = 0.0;
        let mut far = 0.0;
        for k in 0..x.len() {
            let a = node.lo[k] - x[k];
            let b = x[k] - node.hi[k];
            let gap = a.max(b).max(0.0);
            near += gap * gap;
            let span = (x[k] - node.lo[k]).abs().max((node.hi[k] - x[k]).abs());
            far += span * span;
        }
        (near.sqrt(), far.sqrt())
    }

    fn visit(
        &self,
        space: &MetricSpace,
        masses: &[f64],
        x: &[f64],
        r: f64,
        acc: &mut BallAcc,
        want_members: bool,
    ) {
        let mut stack = vec![0usize];
        let rr = r * (1.0 + TOL);
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            let (near, far) = Self::near_far(node, x);
            // the box corners bound every atom distance, with a little rounding slack
            if near > rr * (1.0 + 1e-12) + 1e-300 {
                continue;
            }
            if !want_members && far <= r * (1.0 - SHELL) {
                acc.mass += node.mass;
                continue;
            }
            match (node.left, node.right) {
                (Some(l), Some(rt)) => {
                    stack.push(l);
                    stack.push(rt);
                }
                _ => {
                    for &i in &self.perm[node.start..node.end] {
                        let d = mfdm_metric_dist(space.coords(i).unwrap(), x);
                        acc.take(i, d, r, masses[i], want_members);
                    }
                }
            }
        }
    }
}

fn mfdm_metric_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

#[derive(Debug, Default)]
pub(crate) struct BallAcc {
    pub mass: f64,
    pub boundary: bool,
    pub members: Vec<usize>,
}

impl BallAcc {
    fn take(&mut self, i: usize, d: f64, r: f64, m: f64, want: bool) {
        if d <= r * (1.0 + TOL) {
            self.mass += m;
            if want {
                self.members.push(i);
            }
        }
        if (d - r).abs() <= SHELL * r {
            self.boundary = true;
        }
    }
}

impl SpatialIndex {
    pub(crate) fn build(space: &MetricSpace, masses: &[f64]) -> SpatialIndex {
        match space.dim() {
            Some(1) => {
                let mut order: Vec<usize> = (0..space.len()).collect();
                order.sort_by(|&a, &b| space.coords(a).unwrap()[0].total_cmp(&space.coords(b).unwrap()[0]));
                let xs: Vec<f64> = order.iter().map(|&i| space.coords(i).unwrap()[0]).collect();
                let mut prefix = Vec::with_capacity(order.len() + 1);
                prefix.push(0.0);
                let mut s = 0.0;
                for &i in &order {
                    s += masses[i];
                    prefix.push(s);
                }
                SpatialIndex::Line { order, xs, prefix }
            }
            Some(_) if space.len() > 2 * LEAF => SpatialIndex::Kd(KdTree::build(space, masses)),
            _ => SpatialIndex::Scan,
        }
    }

    pub(crate) fn query(
        &self,
        space: &MetricSpace,
        masses: &[f64],
        centre: &Point,
        r: f64,
        want_members: bool,
    ) -> BallAcc {
        let mut acc = BallAcc::default();
        let coords = space.point_coords(centre);
        match (self, coords) {
            (SpatialIndex::Line { order, xs, prefix }, Some(c)) => {
                let x = c[0];
                let rr = r * (1.0 + TOL);
                let slack = 4.0 * f64::EPSILON * (x.abs() + r);
                let mut lo = xs.partition_point(|&a| a < x - rr - slack);
                let mut hi = xs.partition_point(|&a| a <= x + rr + slack);
                while lo < hi && (xs[lo] - x).abs() > rr {
                    lo += 1;
                }
                while hi > lo && (xs[hi - 1] - x).abs() > rr {
                    hi -= 1;
                }
                acc.mass = prefix[hi] - prefix[lo];
                if want_members {
                    acc.members = order[lo..hi].to_vec();
                }
                // boundary: atoms within the shell on either side
                let band = SHELL * r;
                for target in [x - r, x + r] {
                    let k = xs.partition_point(|&a| a < target - band);
                    if k < xs.len() && (xs[k] - target).abs() <= band {
                        acc.boundary = true;
                    }
                }
            }
            (SpatialIndex::Kd(kd), Some(c)) => {
                kd.visit(space, masses, &c, r, &mut acc, want_members);
                acc.members.sort_unstable();
            }
            _ => {
                for i in 0..space.len() {
                    let d = space.dist_to(i, centre).unwrap_or(f64::INFINITY);
                    acc.take(i, d, r, masses[i], want_members);
                }
            }
        }
        acc
    }
}
