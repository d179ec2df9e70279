use mfdm_measures::*;
use mfdm_metric::{MetricSpace, Point};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two-map construction with children placed at the ends of each parent.
fn two_map_tree(ratios: [f64; 2], weights: [f64; 2], depth: usize) -> MeasureTree {
    let mut t = MeasureTree::new(0.0, 1.0, 1.0).unwrap();
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &c in &frontier {
            let (lo, hi, m) = (t.cell(c).lo, t.cell(c).hi, t.cell(c).mass);
            let l = hi - lo;
            next.push(t.add_child(c, lo, lo + ratios[0] * l, m * weights[0]).unwrap());
            next.push(t.add_child(c, hi - ratios[1] * l, hi, m * weights[1]).unwrap());
        }
        frontier = next;
    }
    t
}

fn cantor(depth: usize) -> MeasureTree {
    two_map_tree([1.0 / 3.0; 2], [0.5; 2], depth)
}

#[test]
fn dirac_ball_mass() {
    let d = AtomicMeasure::dirac(vec![0.0]).unwrap();
    for r in [1e-12, 0.3, 7.0] {
        assert_eq!(d.ball_mass(&Point::Coords(vec![0.0]), r).mass, 1.0);
    }
}

#[test]
fn cantor_balls_at_origin() {
    let t = cantor(8);
    for k in 0..=8 {
        let q = t.ball_mass(0.0, 3f64.powi(-k)).unwrap();
        assert!((q.mass - 2f64.powi(-k)).abs() < 1e-14, "k = {k}: {}", q.mass);
        assert!(!q.boundary);
    }
}

#[test]
fn lebesgue_proxy_half_interval() {
    let m = lebesgue_proxy(4096, 1).unwrap();
    let got = m.ball_mass(&Point::Coords(vec![0.5]), 0.25).mass;
    // direct count of grid centres in [0.25, 0.75]
    let count = (0..4096).filter(|i| ((*i as f64 + 0.5) / 4096.0 - 0.5).abs() <= 0.25).count();
    assert!((got - count as f64 / 4096.0).abs() < 1e-12);
    assert!((got - 0.5).abs() <= 2.0 / 4096.0);
}

#[test]
fn restrict_drops_the_atom() {
    let leb = lebesgue_proxy(1024, 1).unwrap();
    let mix = AtomicMeasure::dirac(vec![0.0]).unwrap().add(&leb).unwrap();
    let rest = mix.restrict(|i| mix.space().coords(i).unwrap()[0] != 0.0).unwrap();
    assert_eq!(rest.len(), leb.len());
    assert!((rest.total_mass() - leb.total_mass()).abs() < 1e-12);
}

#[test]
fn restrict_cantor_prefix() {
    let t = two_map_tree([1.0 / 3.0; 2], [0.7, 0.3], 6);
    let sub = t.restrict_prefix(&[0]).unwrap();
    assert!((sub.total_mass() - 0.7).abs() < 1e-12);
    sub.check_invariants().unwrap();
}

#[test]
fn restrict_plane_plus_line_to_line() {
    // planar grid plus a weighted segment on the diagonal
    let mut pts = Vec::new();
    let mut ms = Vec::new();
    for i in 0..40 {
        for j in 0..40 {
            pts.push(vec![(i as f64 + 0.5) / 40.0, (j as f64 + 0.25) / 40.0]);
            ms.push(1.0 / 1600.0);
        }
    }
    for k in 0..200 {
        let s = (k as f64 + 0.5) / 200.0;
        pts.push(vec![s, s]);
        ms.push(1.0 / 200.0);
    }
    let mu = AtomicMeasure::new(MetricSpace::euclidean(2, &pts).unwrap(), ms, false).unwrap();
    let line = mu
        .restrict(|i| {
            let c = mu.space().coords(i).unwrap();
            c[0] == c[1]
        })
        .unwrap();
    assert_eq!(line.len(), 200);
    assert!((line.total_mass() - 1.0).abs() < 1e-12);
}

#[test]
fn uniform_cantor_partition_sums() {
    let t = cantor(8);
    for n in 0..=8 {
        let s1 = partition_sum(&t, 0.0, 1.0, n, 1.0).unwrap();
        let s0 = partition_sum(&t, 0.0, 1.0, n, 0.0).unwrap();
        let s2 = partition_sum(&t, 0.0, 1.0, n, 2.0).unwrap();
        assert!((s1 - 1.0).abs() < 1e-12);
        assert_eq!(s0, 2f64.powi(n as i32));
        assert!((s2 - 2f64.powi(-(n as i32))).abs() < 1e-14);
    }
}

#[test]
fn cantor_moran_partition_matches_levels() {
    let t = cantor(10);
    let (c0, c1) = t.moran_constants();
    assert!((c0 - 0.5).abs() < 1e-9);
    assert!((c1 - 3.0).abs() < 1e-9);
    assert_eq!(t.moran_partition(0).unwrap().cells, vec![0]);
    for n in 1..8 {
        let thr = c1 / (c0 * 2f64.powi(n));
        // level k with 3^-k <= thr < 3^{-k+1}
        let k = (-thr.ln() / 3f64.ln()).ceil().max(0.0) as i32;
        let part = t.moran_partition(n as usize).unwrap();
        assert_eq!(part.cells.len(), 2usize.pow(k as u32), "n = {n}");
    }
}

#[test]
fn mixed_ratio_partition_mixes_word_lengths() {
    let t = two_map_tree([0.25, 0.5], [0.5, 0.5], 12);
    let part = t.moran_partition(6).unwrap();
    let lens: std::collections::BTreeSet<usize> = part.cells.iter().map(|&c| t.cell(c).depth).collect();
    assert!(lens.len() >= 2);
    let total: f64 = part.cells.iter().map(|&c| t.cell(c).mass).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let (space, level) = t.partition_level(&part, 2.0).unwrap();
    let all: Vec<usize> = (0..space.len()).collect();
    assert_eq!(level.cells.iter().map(|c| c.members.len()).sum::<usize>(), all.len());
}

#[test]
fn kd_queries_match_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts: Vec<Vec<f64>> = (0..3000).map(|_| vec![rng.gen(), rng.gen()]).collect();
    let ms: Vec<f64> = (0..3000).map(|_| rng.gen_range(0.1..1.0)).collect();
    let mu = AtomicMeasure::new(MetricSpace::euclidean(2, &pts).unwrap(), ms.clone(), false).unwrap();
    for _ in 0..200 {
        let x = vec![rng.gen_range(-0.2..1.2), rng.gen_range(-0.2..1.2)];
        let r = rng.gen_range(0.0..0.5);
        let brute: f64 = (0..3000)
            .filter(|&i| {
                let d = ((pts[i][0] - x[0]).powi(2) + (pts[i][1] - x[1]).powi(2)).sqrt();
                d <= r * (1.0 + 1e-12)
            })
            .map(|i| ms[i])
            .sum();
        let q = mu.ball_mass(&Point::Coords(x.clone()), r);
        assert!((q.mass - brute).abs() < 1e-9);
        let atoms = mu.ball_atoms(&Point::Coords(x), r);
        let s: f64 = atoms.iter().map(|&i| mu.mass(i)).sum();
        assert!((s - brute).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn mass_conservation(p0 in 0.05f64..0.95, r0 in 0.05f64..0.45, r1 in 0.05f64..0.45, n in 0usize..9) {
        let t = two_map_tree([r0, r1], [p0, 1.0 - p0], 8);
        let s = partition_sum(&t, 0.5, 10.0, n.min(8), 1.0).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-12);
        t.check_invariants().unwrap();
    }

    #[test]
    fn ball_mass_monotone_in_radius(x in -0.2f64..1.2, r in 0.0f64..0.6, dr in 0.0f64..0.5, p0 in 0.1f64..0.9) {
        let t = two_map_tree([0.3, 0.4], [p0, 1.0 - p0], 7);
        let a = t.ball_mass(x, r).unwrap().mass;
        let b = t.ball_mass(x, r + dr).unwrap().mass;
        prop_assert!(a <= b + 1e-15);
        let atoms = t.leaf_measure().unwrap();
        let a2 = atoms.ball_mass(&Point::Coords(vec![x]), r).mass;
        let b2 = atoms.ball_mass(&Point::Coords(vec![x]), r + dr).mass;
        prop_assert!(a2 <= b2 + 1e-15);
    }

    #[test]
    fn restriction_never_adds_mass(x in 0.0f64..1.0, r in 0.0f64..0.5, bit in 0u32..2) {
        let t = cantor(7);
        let sub = t.restrict_prefix(&[bit]).unwrap();
        prop_assert!(sub.ball_mass(x, r).unwrap().mass <= t.ball_mass(x, r).unwrap().mass + 1e-15);
    }

    #[test]
    fn moran_cells_disjoint_and_full(r0 in 0.1f64..0.45, r1 in 0.1f64..0.45, n in 0usize..6) {
        let t = two_map_tree([r0, r1], [0.5, 0.5], 14);
        if let Ok(part) = t.moran_partition(n) {
            let mut ivs: Vec<(f64, f64)> = part.cells.iter().map(|&c| (t.cell(c).lo, t.cell(c).hi)).collect();
            ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
            for w in ivs.windows(2) {
                prop_assert!(w[0].1 < w[1].0);
            }
            let total: f64 = part.cells.iter().map(|&c| t.cell(c).mass).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
