use mfdm_gallery::*;
use mfdm_homogeneity::{hom_count_atomic, hom_delta_profile_atomic, HomogeneityQuery, ProfileSettings};
use mfdm_measures::{AtomicMeasure, Measure, MeasureTree};
use mfdm_metric::{doubling_cover, triangle_holds, Point};
use mfdm_spectrum::{atomic_ladder, spectrum_curve_on, tau_global, Backend};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn at(x: f64) -> Point {
    Point::Coords(vec![x])
}

/// Largest set of closed radius-`rad` balls with pairwise disjoint interiors
/// and boundaries, centred at sorted points: leftmost-first is optimal.
fn line_packing_oracle(xs: &[f64], rad: f64) -> usize {
    let mut xs = xs.to_vec();
    xs.sort_by(f64::total_cmp);
    let mut last = f64::NEG_INFINITY;
    let mut n = 0;
    for x in xs {
        if x - last > 2.0 * rad * (1.0 + 1e-12) {
            n += 1;
            last = x;
        }
    }
    n
}

fn tau_on(m: &AtomicMeasure, levels: usize, centre: Option<(&[f64], f64)>, q: f64, w: (usize, usize)) -> f64 {
    let l = atomic_ladder(m, Some(levels)).unwrap();
    spectrum_curve_on(&l, Backend::Atomic, centre, &[q], Some(w)).unwrap().samples[0].tau
}

#[test]
fn cascade_global_below_local() {
    let m = gallery_dirac_cascade(&[1, 2, 16], 1).unwrap();
    let w = (3, 18);
    let global = tau_on(&m, 20, None, 0.5, w);
    let local = tau_on(&m, 20, Some((&[0.75], 1e-3)), 0.5, w);
    eprintln!("cascade global {global} local {local}");
    assert!(local.abs() < 1e-9);
    assert!(global <= local - 0.3);
    // a longer last stage pushes the global slope towards (q - 1) d = -0.5
    let short = tau_on(&gallery_dirac_cascade(&[1, 2, 8], 1).unwrap(), 20, None, 0.5, (3, 10));
    eprintln!("cascade short {short}");
    assert!(global < short);
    for g in [tau_on(&m, 20, None, 1.0, w), tau_on(&m, 20, Some((&[0.75], 1e-3)), 1.0, w)] {
        assert!(g.abs() < 1e-9);
    }
}

#[test]
fn cascade_in_the_plane() {
    let m = gallery_dirac_cascade(&[1, 6], 2).unwrap();
    assert_eq!(m.len(), 3 + 4095 + 1);
    // stage-1 atoms carry a quarter each
    let heavy = (0..m.len()).filter(|&i| m.mass(i) == 0.25).count();
    assert_eq!(heavy, 3);
    let global = tau_on(&m, 8, None, 0.5, (2, 7));
    let local = tau_on(&m, 8, Some((&[0.75, 0.75], 1e-3)), 0.5, (2, 7));
    eprintln!("plane cascade {global} {local}");
    assert!(global < local - 0.3);
}

#[test]
fn dirac_plus_lebesgue_global_is_min_local() {
    let m = Measure::Atomic(gallery_dirac_plus_lebesgue(4096).unwrap());
    let pts: Vec<Vec<f64>> = [0.0, 0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|x| vec![*x]).collect();
    let rep = mfdm_spectrum::check_global_is_min_local(&m, 2.0, &pts, 0.05, None).unwrap();
    assert!(rep.gap <= 0.1);
    assert!(rep.locals[0].1.abs() < 0.1);
    assert!((rep.locals[3].1 - 1.0).abs() < 0.1);
    assert!(tau_global(&m, 1.0, None).unwrap().slope.abs() < 1e-9);
}

#[test]
fn burst_counting_inequality() {
    let b = gallery_h_gt_q(4).unwrap();
    for s in &b.stages {
        let k = s.k as f64;
        let (sm, sn): (f64, f64) = (1..=s.k).fold((0.0, 0.0), |(a, c), j| (a + j as f64, c + (j * j) as f64));
        let oracle = (k + sm) / (sn + sm);
        assert!((s.ratio - oracle).abs() < 1e-15);
        assert!(s.ratio < 3.0 / k, "stage {}: {} vs {}", s.k, s.ratio, 3.0 / k);
    }
}

/// Cells of the tree level at `depth`.
fn level(t: &MeasureTree, depth: usize) -> Vec<usize> {
    t.level(depth).unwrap().to_vec()
}

#[test]
fn burst_partition_sums_at_stage_ends() {
    let b = gallery_h_gt_q(3).unwrap();
    for q in [0.25, 0.5, 0.75] {
        for s in &b.stages {
            // two tree levels per stage
            let cells = level(&b.tree, 2 * s.k as usize);
            let sum: f64 = cells.iter().map(|&c| b.tree.cell(c).mass.powf(q)).sum();
            let ratio = sum.log2() / -(s.end_exp as f64);
            // equal masses: the ratio is (q - 1) times the count ratio
            assert!((ratio - (q - 1.0) * s.ratio).abs() < 1e-12);
            assert!(ratio > (q - 1.0) * s.epsilon);
        }
    }
    let t = Measure::Tree(b.tree);
    assert!(tau_global(&t, 1.0, None).unwrap().slope.abs() < 1e-9);
}

#[test]
fn burst_scale_counts() {
    let b = gallery_h_gt_q(4).unwrap();
    let m = b.tree.leaf_measure().unwrap();
    let s = &b.stages[3];
    let end = 0.5f64.powi((b.stages[2].end_exp + s.n) as i32);
    let leaves = b.tree.leaves();
    let x = b.tree.cell(leaves[0]).rep;
    for (delta, expect) in [(0.125, 4), (0.0625, 6)] {
        let q = HomogeneityQuery::new(at(x), delta, 1e-3, end).unwrap();
        let h = hom_count_atomic(&m, &q).unwrap();
        let cands: Vec<f64> = leaves
            .iter()
            .map(|&l| b.tree.cell(l).rep)
            .filter(|&y| (y - x).abs() <= end * (1.0 + 1e-12))
            .collect();
        assert_eq!(cands.len(), 16);
        assert_eq!(line_packing_oracle(&cands, delta * end), expect);
        assert_eq!(h.count, expect);
        assert!(h.exact);
        assert!(expect as f64 >= 0.25 / delta);
    }
}

#[test]
fn burst_profile_tracks_inverse_delta() {
    let b = gallery_h_gt_q(4).unwrap();
    let m = b.tree.leaf_measure().unwrap();
    let end = 0.5f64.powi((b.stages[2].end_exp + b.stages[3].n) as i32);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let leaves = b.tree.leaves();
    for _ in 0..5 {
        let x = b.tree.cell(leaves[rng.gen_range(0..leaves.len())]).rep;
        let s = ProfileSettings::new(vec![0.125, 0.0625], 2.0 * end).with_radii(vec![2.0 * end, end, 0.5 * end]);
        let p = hom_delta_profile_atomic(&m, &at(x), &s).unwrap();
        for e in &p.entries {
            let target = 1.0 / e.delta;
            eprintln!("burst x={x:e} δ={} count={}", e.delta, e.count);
            assert!(e.count as f64 >= target / 4.0 && e.count as f64 <= 4.0 * target);
        }
    }
}

fn m_oracle(k: u32, start: u32, mu: f64) -> u32 {
    let q = 1.0 - 1.0 / (k as f64 + 1.0);
    let target = k as f64 / (k as f64 + 1.0) * (1.0 - q);
    (1..10_000)
        .find(|&m| {
            let num = m as f64 * (1.0 - q) + q * ((0.5f64).powi(k as i32) * mu).log2();
            num / (start + k * k + m) as f64 > target
        })
        .unwrap()
}

#[test]
fn perturbed_exponents_are_minimal() {
    let p = gallery_q_gt_h(2).unwrap();
    assert_eq!(p.stages[0].m, m_oracle(1, 0, 1.0));
    // the lightest stage-2 intervals are the burst pieces, 2^-1 2^-4 each
    assert_eq!(p.stages[1].min_mass, 1.0 / 32.0);
    assert_eq!(p.stages[1].start_exp, 5);
    assert_eq!(p.stages[1].m, m_oracle(2, 5, 1.0 / 32.0));
    assert_eq!(p.stages.iter().map(|s| s.m).collect::<Vec<_>>(), vec![4, 61]);
}

#[test]
fn perturbed_designed_level() {
    let p = gallery_q_gt_h(2).unwrap();
    for s in &p.stages {
        let ratios = p.designed_ratios(s.k as usize).unwrap();
        let roots = &p.stage_cells[s.k as usize - 1];
        assert_eq!(ratios.len(), roots.len());
        for (&r, &root) in ratios.iter().zip(roots) {
            let mu = p.tree.cell(root).mass;
            let sub = mu * 0.5f64.powi(s.l as i32);
            let closed = 2f64.powf(s.m as f64 * (1.0 - s.q)) * sub.powf(s.q)
                + 2.0 * (2f64.powi(s.l as i32) - 1.0) * (0.5 * sub).powf(s.q);
            let denom = (s.start_exp + s.n * s.l + s.m) as f64;
            assert!((r - closed.log2() / denom).abs() < 1e-12);
            // the burst term alone already clears the target
            let burst = (s.m as f64 * (1.0 - s.q) + s.q * sub.log2()) / denom;
            assert!(r >= burst && burst > s.target, "stage {}: {r} {burst} {}", s.k, s.target);
        }
    }
}

#[test]
fn perturbed_outer_leaves_have_bounded_counts() {
    let p = gallery_q_gt_h(2).unwrap();
    let m = p.atoms(BURST_VIEW_LOG2).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    // below the stage-2 subinterval length 2^-9 no burst is in view
    let radii: Vec<f64> = (0..8).map(|i| 2f64.powi(-10 - 4 * i)).collect();
    let s = ProfileSettings::new(vec![0.25, 0.125, 0.0625, 0.03125], radii[0]).with_radii(radii);
    let last = p.burst_cells.last().unwrap();
    let gap = |x: f64| {
        last.iter()
            .map(|&b| {
                let (a, z) = (p.lo[b], p.lo[b] + p.tree.cell(b).diam());
                (a - x).max(x - z).max(0.0)
            })
            .fold(f64::INFINITY, f64::min)
    };
    let away: Vec<usize> = p.outer_leaves.iter().copied().filter(|&l| gap(p.centre(l)) > 2f64.powi(-10)).collect();
    assert!(away.len() >= p.outer_leaves.len() / 2);
    let mut worst = 0;
    for _ in 0..20 {
        let leaf = away[rng.gen_range(0..away.len())];
        let prof = hom_delta_profile_atomic(&m, &at(p.centre(leaf)), &s).unwrap();
        worst = worst.max(prof.entries.iter().map(|e| e.count).max().unwrap());
    }
    eprintln!("perturbed worst count {worst}");
    assert!(worst <= 2);
    let t = Measure::Tree(p.tree);
    assert!(tau_global(&t, 1.0, None).unwrap().slope.abs() < 1e-9);
}

#[test]
fn one_point_count_inequalities() {
    let op = gallery_one_point(2).unwrap();
    let m = &op.measure;
    for s in &op.stages {
        let k = s.k as usize;
        for n in k..=2 {
            let r = 10f64.powi(-(n as i32));
            let eps = 0.5f64.powi(k as i32) * s.sqrt_lambda() / 2.0;
            let q = HomogeneityQuery::new(at(0.0), s.lambda / 3.0, eps, r).unwrap();
            let h = hom_count_atomic(m, &q).unwrap();
            eprintln!("one-point lower k={k} n={n} count={} exact={}", h.count, h.exact);
            assert!(h.exact);
            assert!(h.count as f64 >= s.inv_sqrt as f64);
        }
        let bound = s.lambda.powf(-0.125);
        for n in k..=2 {
            for f in [1.0, 3.0, 5.5] {
                let r = f * 10f64.powi(-(n as i32));
                let q = HomogeneityQuery::new(at(0.0), 2.0 * s.sqrt_lambda(), 1e-12, r).unwrap();
                let h = hom_count_atomic(m, &q).unwrap();
                eprintln!("one-point upper k={k} r={r} count={} bound={bound}", h.count);
                assert!(h.exact);
                assert!(h.count as f64 <= bound + 1e-9);
            }
        }
    }
}

#[test]
fn one_point_total_mass() {
    let op = gallery_one_point(2).unwrap();
    let oracle: f64 = op
        .stages
        .iter()
        .map(|s| {
            op.stages[..s.k as usize]
                .iter()
                .map(|f| 0.5f64.powi(f.k as i32) * f.sqrt_lambda() * (f.inv_sqrt + 1) as f64 * s.m)
                .sum::<f64>()
        })
        .sum();
    assert!((op.measure.total_mass() - oracle).abs() < 1e-12);
    assert!(oracle < 1.0);
}

fn ring_slope(m: &AtomicMeasure, gamma: f64) -> f64 {
    let radii: Vec<f64> = (6..=11).map(|k| 1.1 * 0.5f64.powi(k)).collect();
    let s = ProfileSettings::new(vec![0.25, 0.125, 0.0625, 0.03125], radii[0]).with_radii(radii).with_gamma(gamma);
    let p = hom_delta_profile_atomic(m, &Point::Coords(vec![0.0, 0.0]), &s).unwrap();
    for e in &p.entries {
        eprintln!("ring γ={gamma} δ={} count={} ε={} exact={}", e.delta, e.count, e.epsilon, e.exact);
    }
    p.estimate.unwrap().slope
}

#[test]
fn ring_gamma_dependence() {
    let m = gallery_ring_measure(13, ring_atoms_for(1.0 / 32.0).unwrap()).unwrap();
    let lo = ring_slope(&m, 1.5);
    let hi = ring_slope(&m, 2.5);
    eprintln!("ring slopes {lo} {hi}");
    assert!(lo > 0.5);
    assert!(lo - hi >= 0.5);
}

#[test]
fn ring_counts_fall_with_gamma() {
    let m = gallery_ring_measure(8, 256).unwrap();
    let x = Point::Coords(vec![0.0, 0.0]);
    for k in 3..6 {
        let r = 1.1 * 0.5f64.powi(k);
        let mut last = usize::MAX;
        for g in [1.2, 1.5, 2.5, 5.0] {
            let q = HomogeneityQuery::new(x.clone(), 0.125, 2e-3, r).unwrap().with_gamma(g).unwrap();
            let c = hom_count_atomic(&m, &q).unwrap().count;
            assert!(c <= last);
            last = c;
        }
    }
}

#[test]
fn appendix_ratio_identity() {
    let a = gallery_appendix_a(3).unwrap();
    assert_eq!(a.measure.len(), 3 * 9 * 25);
    assert_eq!(a.set.len(), 2 * 8 * 24);
    assert!((a.measure.total_mass() - 1.0).abs() < 1e-12);
    let rows = a.ratio_rows().unwrap();
    assert_eq!(rows.len(), a.set.len() * 3);
    for r in &rows {
        assert!((r.ball_mass - r.cylinder_mass - r.zero_mass).abs() < 1e-15);
        assert!((r.cylinder_ratio - r.formula).abs() < 1e-12);
        // A misses the words of the cylinder with a zero further down
        let keep: f64 = (r.n + 1..=3).map(|m| 1.0 - 0.5f64.powi(m as i32)).product();
        assert!((r.set_ratio - keep * r.formula).abs() < 1e-12);
    }
    for (n, v) in [(1, 1.0 / 3.0), (2, 3.0 / 11.0), (3, 7.0 / 31.0)] {
        assert!(rows.iter().filter(|r| r.n == n).all(|r| (r.cylinder_ratio - v).abs() < 1e-12));
    }
}

#[test]
fn appendix_metric_checks() {
    let a = gallery_appendix_a(3).unwrap();
    let s = a.space();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..2000 {
        let (i, j, k) = (rng.gen_range(0..s.len()), rng.gen_range(0..s.len()), rng.gen_range(0..s.len()));
        assert!(triangle_holds(s, i, j, k));
    }
    for _ in 0..40 {
        let w = rng.gen_range(0..s.len());
        let r = 2f64.powf(-rng.gen_range(1.0..30.0));
        let cover = doubling_cover(s, w, r);
        assert!(cover.map_or(false, |c| c.len() <= 3), "word {w} radius {r}");
    }
}

#[test]
fn generators_are_deterministic() {
    let fp = [
        fingerprint_atomic(&gallery_dirac_cascade(&[1, 2, 4], 1).unwrap()),
        fingerprint_atomic(&gallery_dirac_plus_lebesgue(64).unwrap()),
        fingerprint_tree(&gallery_h_gt_q(3).unwrap().tree),
        fingerprint_tree(&gallery_q_gt_h(2).unwrap().tree),
        fingerprint_atomic(&gallery_one_point(2).unwrap().measure),
        fingerprint_atomic(&gallery_ring_measure(5, 64).unwrap()),
        fingerprint_atomic(&gallery_appendix_a(2).unwrap().measure),
        fingerprint_tree(&gallery_selfsimilar(&[1.0 / 3.0, 1.0 / 3.0], &[0.7, 0.3], 6).unwrap()),
    ];
    let again = [
        fingerprint_atomic(&gallery_dirac_cascade(&[1, 2, 4], 1).unwrap()),
        fingerprint_atomic(&gallery_dirac_plus_lebesgue(64).unwrap()),
        fingerprint_tree(&gallery_h_gt_q(3).unwrap().tree),
        fingerprint_tree(&gallery_q_gt_h(2).unwrap().tree),
        fingerprint_atomic(&gallery_one_point(2).unwrap().measure),
        fingerprint_atomic(&gallery_ring_measure(5, 64).unwrap()),
        fingerprint_atomic(&gallery_appendix_a(2).unwrap().measure),
        fingerprint_tree(&gallery_selfsimilar(&[1.0 / 3.0, 1.0 / 3.0], &[0.7, 0.3], 6).unwrap()),
    ];
    assert_eq!(fp, again);
    let golden: [u64; 8] = [
        0x31dce095c9705579,
        0x8ac4f7f7839b7099,
        0x9c2fd45c47175c88,
        0x15380424a8c73010,
        0x18812f70fc052e3e,
        0xad44751dafc8eac5,
        0x80deadd5f2e12358,
        0x3e22b19eb5c90e2c,
    ];
    assert_eq!(fp, golden);
}

#[test]
fn definitions_round_trip() {
    let defs = vec![
        MeasureDef::AppendixA { depth: 2 },
        MeasureDef::HGtQ { stages: 2 },
        MeasureDef::Rings { rings: 3, atoms_per_ring: 16 },
        MeasureDef::SelfSimilar { ratios: vec![0.3, 0.3], weights: vec![0.5, 0.5], depth: 4 },
        MeasureDef::Atomic { points: vec![vec![0.0], vec![1.0]], masses: vec![1.0, 3.0], normalize: true },
    ];
    for d in defs {
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains(&format!("\"kind\":\"{}\"", d.name())));
        let back: MeasureDef = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        assert!(back.build().unwrap().total_mass() > 0.0);
    }
    let d: MeasureDef = serde_json::from_str(r#"{"kind":"lebesgue","per_axis":8}"#).unwrap();
    assert_eq!(d, MeasureDef::Lebesgue { per_axis: 8, dim: 1 });
    assert!(serde_json::from_str::<MeasureDef>(r#"{"kind":"nope"}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cascades_are_probability_measures(sched in prop::collection::vec(1u32..5, 1..4), d in 1usize..3) {
        let m = gallery_dirac_cascade(&sched, d).unwrap();
        prop_assert!((m.total_mass() - 1.0).abs() < 1e-12);
        let atoms: usize = sched.iter().map(|&n| (1usize << (n as usize * d)) - 1).sum::<usize>() + 1;
        prop_assert_eq!(m.len(), atoms);
    }

    #[test]
    fn minimal_m_is_minimal(k in 1u32..5, start in 0u32..200, lmu in -60.0f64..0.0) {
        let mu = 2f64.powf(lmu);
        let m = minimal_m(k, start, mu).unwrap();
        prop_assert_eq!(m, m_oracle(k, start, mu));
    }

    #[test]
    fn ring_masses_follow_length(rings in 1usize..8, n in 3usize..40) {
        let m = gallery_ring_measure(rings, n).unwrap();
        let mut fact = 1.0;
        let mut total = 0.0;
        for k in 1..=rings {
            fact *= k as f64;
            total += 2.0 * std::f64::consts::PI * 0.5f64.powi(k as i32) / fact;
        }
        prop_assert!((m.total_mass() - total).abs() < 1e-12);
    }
}
