use crate::spec::SelfSimilarSpec;
use mfdm_measures::MeasureTree;
use mfdm_metric::{Error, Result};

/// Outcome of one structural condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub pass: bool,
    /// Measured quantity behind the verdict (ratio, constant or deviation).
    pub value: f64,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoranValidation {
    pub checks: Vec<ConditionCheck>,
    pub c0: f64,
    pub c1: f64,
}

impl MoranValidation {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&ConditionCheck> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// Largest allowed deviation of the log-diameter ratios at the finest scale.
pub const RATIO_DEVIATION_MAX: f64 = 0.25;

/// Leaves in left-to-right order and, per cell, the half-open range of its leaves.
struct LeafOrder {
    leaves: Vec<usize>,
    range: Vec<(usize, usize)>,
}

fn leaf_order(tree: &MeasureTree) -> LeafOrder {
    let mut leaves = Vec::new();
    let mut range = vec![(0, 0); tree.len()];
    // iterative post-order so deep trees do not overflow the stack
    let mut stack = vec![(0usize, false)];
    while let Some((i, done)) = stack.pop() {
        let c = tree.cell(i);
        if c.children.is_empty() {
            range[i] = (leaves.len(), leaves.len() + 1);
            leaves.push(i);
        } else if done {
            let first = c.children.iter().map(|&k| range[k].0).min().unwrap();
            let last = c.children.iter().map(|&k| range[k].1).max().unwrap();
            range[i] = (first, last);
        } else {
            stack.push((i, true));
            let mut kids = c.children.clone();
            kids.sort_by(|&a, &b| tree.cell(a).lo.total_cmp(&tree.cell(b).lo));
            stack.extend(kids.into_iter().rev().map(|k| (k, false)));
        }
    }
    LeafOrder { leaves, range }
}

/// Distance from `x` to the leaves outside the leaf range `(a, b)`.
fn outside_gap(tree: &MeasureTree, order: &LeafOrder, (a, b): (usize, usize), x: f64) -> f64 {
    let mut g = f64::INFINITY;
    if a > 0 {
        g = g.min(x - tree.cell(order.leaves[a - 1]).hi);
    }
    if b < order.leaves.len() {
        g = g.min(tree.cell(order.leaves[b]).lo - x);
    }
    g
}

/// Check the eight structural conditions on an embedded tree.
///
/// With a spec the ratio conditions compare against its limit ratios; without
/// one they use the mean child-to-parent ratio per child position observed on
/// the deepest level.
pub fn validate_moran(tree: &MeasureTree, spec: Option<&SelfSimilarSpec>) -> Result<MoranValidation> {
    if !tree.is_embedded() {
        return Err(Error::Unsupported("validation needs an embedded tree".into()));
    }
    let cells = tree.cells();
    let tol = |d: f64| 1e-12 * d.max(1e-300);
    let mut checks = Vec::with_capacity(8);

    // M1 nested
    let mut witness = None;
    for (i, c) in cells.iter().enumerate() {
        if let Some(p) = c.parent {
            let pc = &cells[p];
            if c.lo < pc.lo - tol(pc.diam()) || c.hi > pc.hi + tol(pc.diam()) {
                witness = Some(format!("cell {i} {:?} not inside parent {p}", c.word));
                break;
            }
        }
    }
    checks.push(ConditionCheck { name: "M1", pass: witness.is_none(), value: 0.0, witness });

    // M2 siblings disjoint (closed intervals)
    let mut witness = None;
    let mut min_gap = f64::INFINITY;
    'outer: for c in cells {
        let mut kids = c.children.clone();
        kids.sort_by(|&a, &b| cells[a].lo.total_cmp(&cells[b].lo));
        for w in kids.windows(2) {
            let gap = cells[w[1]].lo - cells[w[0]].hi;
            min_gap = min_gap.min(gap / c.diam());
            if gap <= 0.0 {
                witness = Some(format!("siblings {} and {} meet", w[0], w[1]));
                break 'outer;
            }
        }
    }
    checks.push(ConditionCheck { name: "M2", pass: witness.is_none(), value: min_gap, witness });

    // M3 interior representatives
    let (c0, c1) = tree.moran_constants();
    let m3_w = if c0 > 0.0 { None } else { Some("a representative lies on its cell boundary".into()) };
    checks.push(ConditionCheck { name: "M3", pass: c0 > 0.0, value: c0, witness: m3_w });

    // M4 uniform contraction
    let mut theta: f64 = 0.0;
    for c in cells {
        if let Some(p) = c.parent {
            theta = theta.max(c.diam() / cells[p].diam());
        }
    }
    let m4 = theta < 1.0 - 1e-12;
    checks.push(ConditionCheck {
        name: "M4",
        pass: m4,
        value: theta,
        witness: (!m4).then(|| "a child is as large as its parent".into()),
    });

    // M5 bounded parent-to-child ratio
    let m5 = c1.is_finite();
    checks.push(ConditionCheck { name: "M5", pass: m5, value: c1, witness: (!m5).then(|| "unbounded ratio".into()) });

    let order = leaf_order(tree);
    let limit = limit_ratios(tree, spec);

    // M6 log-diameter versus product of limit ratios along each branch
    let (dev_fine, dev_mid) = ratio_deviation(tree, &limit);
    let m6 = dev_fine.is_finite() && dev_fine <= RATIO_DEVIATION_MAX && dev_fine <= dev_mid + 1e-9;
    checks.push(ConditionCheck {
        name: "M6",
        pass: m6,
        value: dev_fine,
        witness: (!m6).then(|| format!("deviation {dev_fine} at the deepest level, {dev_mid} at half depth")),
    });

    // M7 separation of each Moran cut
    let sep = separation_constant(tree, &order, c0);
    let m7 = sep > 0.0;
    checks.push(ConditionCheck { name: "M7", pass: m7, value: sep, witness: (!m7).then(|| "a cut cell touches the rest".into()) });

    // M8 ball-to-cell log ratio
    let (b_fine, b_mid) = ball_deviation(tree, &order);
    // the ball ratio oscillates with the position of r between cell scales, so only the size is tested
    let m8 = b_fine.is_finite() && b_fine <= RATIO_DEVIATION_MAX;
    checks.push(ConditionCheck {
        name: "M8",
        pass: m8,
        value: b_fine,
        witness: (!m8).then(|| format!("deviation {b_fine} at the finest radius, {b_mid} at a middle radius")),
    });

    Ok(MoranValidation { checks, c0, c1 })
}

fn limit_ratios(tree: &MeasureTree, spec: Option<&SelfSimilarSpec>) -> Vec<f64> {
    if let Some(s) = spec {
        return s.ratios().to_vec();
    }
    let depth = tree.max_depth();
    let mut sum = Vec::<f64>::new();
    let mut cnt = Vec::<f64>::new();
    if depth == 0 {
        return sum;
    }
    for &i in tree.level(depth).unwrap() {
        let c = tree.cell(i);
        let k = *c.word.last().unwrap() as usize;
        if sum.len() <= k {
            sum.resize(k + 1, 0.0);
            cnt.resize(k + 1, 0.0);
        }
        sum[k] += c.diam() / tree.cell(c.parent.unwrap()).diam();
        cnt[k] += 1.0;
    }
    sum.iter().zip(&cnt).map(|(s, n)| if *n > 0.0 { s / n } else { f64::NAN }).collect()
}

/// Max over leaves of `|log diam(E_{i|n}) / log r_{i|n} - 1|`, at the deepest level
/// and at half depth.
fn ratio_deviation(tree: &MeasureTree, limit: &[f64]) -> (f64, f64) {
    let depth = tree.max_depth();
    if depth < 2 {
        return (0.0, 0.0);
    }
    let root = tree.cell(0).diam();
    let at_level = |n: usize| -> f64 {
        let mut worst: f64 = 0.0;
        for &i in tree.level(n).unwrap() {
            let c = tree.cell(i);
            let mut lr = 0.0;
            for &k in &c.word {
                match limit.get(k as usize) {
                    Some(r) if *r > 0.0 && *r < 1.0 => lr += r.ln(),
                    _ => return f64::INFINITY,
                }
            }
            worst = worst.max(((c.diam() / root).ln() / lr - 1.0).abs());
        }
        worst
    };
    (at_level(depth), at_level(depth / 2))
}

/// `min_n min_Q max_{x ∈ Q ∩ E} dist(x, E \ Q) 2^n` over all resolvable cuts.
fn separation_constant(tree: &MeasureTree, order: &LeafOrder, c0: f64) -> f64 {
    if !(c0 > 0.0) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for n in 0..64 {
        let Ok(cut) = tree.moran_partition(n) else { break };
        let scale = 0.5f64.powi(n as i32);
        for &q in &cut.cells {
            let rg = order.range[q];
            let mut cq: f64 = 0.0;
            for k in rg.0..rg.1 {
                let x = tree.cell(order.leaves[k]).rep;
                cq = cq.max(outside_gap(tree, order, rg, x));
            }
            best = best.min(cq / scale);
        }
    }
    best
}

/// `|log r / log diam(E_{i|n(i,r)}) - 1|` at the finest resolvable radius and at a
/// middle radius, maximised over sampled leaves.
fn ball_deviation(tree: &MeasureTree, order: &LeafOrder) -> (f64, f64) {
    let leaves = &order.leaves;
    if tree.max_depth() < 2 || leaves.len() < 2 {
        return (0.0, 0.0);
    }
    let root = tree.cell(0).diam();
    let max_leaf = leaves.iter().map(|&i| tree.cell(i).diam()).fold(0.0f64, f64::max);
    let steps = ((root / (4.0 * max_leaf)).log2().floor() as i32).max(1);
    let fine_r = root * 0.5f64.powi(steps);
    let mid_r = root * 0.5f64.powi((steps / 2).max(1));
    let stride = (leaves.len() / 256).max(1);
    let mut fine: f64 = 0.0;
    let mut mid: f64 = 0.0;
    for &leaf in leaves.iter().step_by(stride) {
        let x = tree.cell(leaf).rep;
        let mut chain = vec![leaf];
        while let Some(p) = tree.cell(*chain.last().unwrap()).parent {
            chain.push(p);
        }
        chain.reverse();
        let dev = |r: f64| -> f64 {
            let mut deepest = chain[0];
            for &a in &chain {
                if outside_gap(tree, order, order.range[a], x) > r {
                    deepest = a;
                }
            }
            let d = tree.cell(deepest).diam() / root;
            if d >= 1.0 {
                return f64::INFINITY;
            }
            ((r / root).ln() / d.ln() - 1.0).abs()
        };
        fine = fine.max(dev(fine_r));
        mid = mid.max(dev(mid_r));
    }
    (fine, mid)
}
