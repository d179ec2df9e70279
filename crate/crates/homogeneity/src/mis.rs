//! Maximum independent sets of small conflict graphs.

use std::borrow::Cow;

/// Largest component solved exactly.
pub const EXACT_CUTOFF: usize = 64;

const REDUCE_BUDGET: u64 = 200_000_000;
const NODE_BUDGET: u64 = 20_000_000;

/// Undirected graph as adjacency lists.
#[derive(Debug, Clone)]
pub(crate) struct Graph<'a> {
    pub adj: Cow<'a, [Vec<usize>]>,
}

impl Graph<'_> {
    pub fn len(&self) -> usize {
        self.adj.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Solution {
    pub set: Vec<usize>,
    pub exact: bool,
}

/// Take vertices in the given order whenever they conflict with nothing taken.
pub(crate) fn greedy(g: &Graph, order: &[usize]) -> Vec<usize> {
    let mut blocked = vec![false; g.len()];
    let mut out = Vec::new();
    for &v in order {
        if blocked[v] {
            continue;
        }
        out.push(v);
        blocked[v] = true;
        for &w in &g.adj[v] {
            blocked[w] = true;
        }
    }
    out
}

/// Drop every `v` having a neighbour `u` with `N[u] ⊆ N[v]`; some maximum
/// independent set avoids such a `v`. Returns the surviving vertices.
fn dominance_reduce(g: &Graph) -> Vec<bool> {
    let n = g.len();
    let mut alive = vec![true; n];
    let mut adj = g.adj.to_vec();
    let mut stamp = vec![usize::MAX; n];
    let mut ops = 0u64;
    let mut changed = true;
    'outer: while changed {
        changed = false;
        for a in adj.iter_mut() {
            a.retain(|&w| alive[w]);
        }
        // low-degree neighbours are the likeliest to be dominated
        let deg: Vec<usize> = adj.iter().map(|a| a.len()).collect();
        for v in 0..n {
            if !alive[v] {
                continue;
            }
            for &w in &adj[v] {
                stamp[w] = v;
            }
            stamp[v] = v;
            let mut nb: Vec<usize> = adj[v].iter().copied().filter(|&u| alive[u] && deg[u] <= deg[v]).collect();
            nb.sort_by_key(|&u| deg[u]);
            for u in nb {
                if !alive[u] {
                    continue;
                }
                let mut ok = true;
                for &w in &adj[u] {
                    ops += 1;
                    if alive[w] && stamp[w] != v {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    alive[v] = false;
                    changed = true;
                    break;
                }
            }
            if ops > REDUCE_BUDGET {
                break 'outer;
            }
        }
    }
    alive
}

fn components(g: &Graph, alive: &[bool]) -> Vec<Vec<usize>> {
    let n = g.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if !alive[s] || seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < comp.len() {
            let v = comp[k];
            k += 1;
            for &w in &g.adj[v] {
                if alive[w] && !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Clique-cover bound: the number of greedily grown cliques covering `mask`.
fn cover_bound(nbr: &[u64], mut mask: u64) -> u32 {
    let mut count = 0;
    while mask != 0 {
        let v = mask.trailing_zeros() as usize;
        let mut cand = mask & nbr[v];
        let mut clique = 1u64 << v;
        while cand != 0 {
            let w = cand.trailing_zeros() as usize;
            clique |= 1u64 << w;
            cand &= nbr[w];
        }
        mask &= !clique;
        count += 1;
    }
    count
}

struct Search<'a> {
    nbr: &'a [u64],
    best: u64,
    nodes: u64,
    aborted: bool,
}

impl Search<'_> {
    fn run(&mut self, mask: u64, cur: u64) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > NODE_BUDGET {
            self.aborted = true;
            return;
        }
        if mask == 0 {
            if cur.count_ones() > self.best.count_ones() {
                self.best = cur;
            }
            return;
        }
        if cur.count_ones() + cover_bound(self.nbr, mask) <= self.best.count_ones() {
            return;
        }
        let (mut vmin, mut dmin, mut vmax, mut dmax) = (0, u32::MAX, 0, 0);
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            let d = (self.nbr[v] & mask).count_ones();
            if d < dmin {
                (vmin, dmin) = (v, d);
            }
            if d > dmax {
                (vmax, dmax) = (v, d);
            }
        }
        if dmin <= 1 {
            let v = vmin;
            self.run(mask & !(self.nbr[v] | 1u64 << v), cur | 1u64 << v);
            return;
        }
        let v = vmax;
        self.run(mask & !(self.nbr[v] | 1u64 << v), cur | 1u64 << v);
        self.run(mask & !(1u64 << v), cur);
    }
}

/// Exact maximum independent set of a component of at most 64 vertices,
/// or `None` when the node budget runs out.
fn exact_small(g: &Graph, comp: &[usize]) -> Option<Vec<usize>> {
    debug_assert!(comp.len() <= 64);
    let nbr: Vec<u64> = comp
        .iter()
        .map(|&v| {
            g.adj[v].iter().filter_map(|w| comp.binary_search(w).ok()).fold(0u64, |acc, j| acc | 1u64 << j)
        })
        .collect();
    // seed with a min-degree greedy pass
    let mut order: Vec<usize> = (0..comp.len()).collect();
    order.sort_by_key(|&i| nbr[i].count_ones());
    let mut seed = 0u64;
    let mut blocked = 0u64;
    for i in order {
        if blocked >> i & 1 == 0 {
            seed |= 1u64 << i;
            blocked |= nbr[i] | 1u64 << i;
        }
    }
    let full = if comp.len() == 64 { u64::MAX } else { (1u64 << comp.len()) - 1 };
    let mut s = Search { nbr: &nbr, best: seed, nodes: 0, aborted: false };
    s.run(full, 0);
    if s.aborted {
        return None;
    }
    Some((0..comp.len()).filter(|&i| s.best >> i & 1 == 1).map(|i| comp[i]).collect())
}

/// Number of cliques in a greedy clique partition, seeded in `order`; an upper
/// bound on any independent set.
pub(crate) fn clique_cover(g: &Graph, order: &[usize]) -> usize {
    let n = g.len();
    let mut assigned = vec![false; n];
    let mut hits = vec![0usize; n];
    let mut rank = vec![0usize; n];
    for (k, &v) in order.iter().enumerate() {
        rank[v] = k;
    }
    let mut cliques = 0;
    for &v in order {
        if assigned[v] {
            continue;
        }
        cliques += 1;
        assigned[v] = true;
        let mut members = vec![v];
        let mut cand: Vec<usize> = g.adj[v].iter().copied().filter(|&w| !assigned[w]).collect();
        cand.sort_by_key(|&w| rank[w]);
        for &w in &g.adj[v] {
            hits[w] += 1;
        }
        for w in cand {
            if hits[w] == members.len() {
                assigned[w] = true;
                members.push(w);
                for &u in &g.adj[w] {
                    hits[u] += 1;
                }
            }
        }
        for &c in &members {
            for &u in &g.adj[c] {
                hits[u] = 0;
            }
        }
    }
    cliques
}

/// Maximum independent set when the greedy set meets the clique-cover bound or
/// every reduced component is small enough; otherwise the greedy set over `order`.
///
/// `cover_order` seeds the clique cover (coordinate order works well for
/// geometric graphs).
pub(crate) fn max_independent(g: &Graph, order: &[usize], cover_order: &[usize]) -> Solution {
    let greedy_set = greedy(g, order);
    if clique_cover(g, cover_order) == greedy_set.len() {
        return Solution { set: greedy_set, exact: true };
    }
    let alive = dominance_reduce(g);
    let mut set = Vec::new();
    for comp in components(g, &alive) {
        if comp.len() == 1 {
            set.push(comp[0]);
            continue;
        }
        if comp.len() > EXACT_CUTOFF {
            return Solution { set: greedy_set, exact: false };
        }
        match exact_small(g, &comp) {
            Some(s) => set.extend(s),
            None => return Solution { set: greedy_set, exact: false },
        }
    }
    set.sort_unstable();
    debug_assert!(set.len() >= greedy_set.len());
    if set.len() < greedy_set.len() {
        return Solution { set: greedy_set, exact: false };
    }
    Solution { set, exact: true }
}
