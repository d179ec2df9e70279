use mfdm_measures::{lebesgue_proxy, AtomicMeasure, Measure, MeasureTree};
use mfdm_metric::{MetricSpace, Point};
use mfdm_moran::{build_selfsimilar_tree, SelfSimilarSpec};
use mfdm_spectrum::*;
use proptest::prelude::*;

fn tree(r: &[f64], p: &[f64], depth: usize) -> MeasureTree {
    build_selfsimilar_tree(&SelfSimilarSpec::new(r.to_vec(), p.to_vec()).unwrap(), depth).unwrap()
}

fn cantor(depth: usize) -> MeasureTree {
    tree(&[1.0 / 3.0, 1.0 / 3.0], &[0.5, 0.5], depth)
}

fn biased(depth: usize) -> MeasureTree {
    tree(&[1.0 / 3.0, 1.0 / 3.0], &[0.7, 0.3], depth)
}

fn log32() -> f64 {
    2f64.ln() / 3f64.ln()
}

fn dirac_plus_lebesgue() -> Measure {
    let leb = lebesgue_proxy(4096, 1).unwrap();
    let dirac = AtomicMeasure::dirac(vec![0.0]).unwrap();
    Measure::Atomic(dirac.add(&leb).unwrap().normalized())
}

#[test]
fn cantor_tau_values() {
    let t = cantor(10);
    let e = tau_local(&t, 0.0, 1.0, 2.0, None).unwrap();
    assert!((e.slope - log32()).abs() < 1e-9);
    let g = tau_global(&Measure::Tree(t), 0.0, None).unwrap();
    assert!((g.slope + log32()).abs() < 1e-9);
}

#[test]
fn biased_tau_matches_closed_form() {
    let t = biased(12);
    // (0.7^q + 0.3^q) 3^τ = 1
    for q in [-1.0, 0.0, 0.5, 2.0, 3.0] {
        let oracle = -(0.7f64.powf(q) + 0.3f64.powf(q)).ln() / 3f64.ln();
        let e = tau_local(&t, t.cell(0).rep, 1.0, q, None).unwrap();
        assert!((e.slope - oracle).abs() < 1e-9, "q = {q}: {} vs {oracle}", e.slope);
    }
}

#[test]
fn mixed_ratio_tau_matches_pressure_equation() {
    let spec = SelfSimilarSpec::new(vec![0.2, 0.45], vec![0.35, 0.65]).unwrap();
    let m = Measure::Tree(build_selfsimilar_tree(&spec, 16).unwrap());
    for q in [-1.5, -0.5, 0.0, 0.5, 2.0, 3.5] {
        let exact = mfdm_moran::solve_tau(&spec, q).unwrap();
        let got = tau_global(&m, q, None).unwrap();
        assert!((got.slope - exact).abs() < 1e-9, "q={q}: {} vs {exact}", got.slope);
        assert!(got.max_inc - got.min_inc < 1e-9);
    }
}

#[test]
fn tau_one_vanishes_on_trees() {
    let trees = [cantor(8), biased(10), tree(&[0.25, 0.5], &[0.5, 0.5], 10), tree(&[0.2, 0.3, 0.25], &[0.2, 0.5, 0.3], 7)];
    for t in &trees {
        let leaf = t.leaves()[3];
        for (x, r) in [(t.cell(0).rep, 1.0), (t.cell(leaf).rep, 0.05)] {
            let e = tau_local(t, x, r, 1.0, None).unwrap();
            assert!(e.slope.abs() <= 1e-9, "{}", e.slope);
        }
    }
}

#[test]
fn lebesgue_and_dirac_global() {
    let leb = Measure::Atomic(lebesgue_proxy(4096, 1).unwrap());
    assert!((tau_global(&leb, 2.0, None).unwrap().slope - 1.0).abs() < 0.02);
    let mix = dirac_plus_lebesgue();
    assert!(tau_global(&mix, 2.0, None).unwrap().slope.abs() < 0.1);
    assert!(matches!(tau_global(&mix, -1.0, None), Err(mfdm_metric::Error::Unsupported(_))));
}

#[test]
fn dim_q_of_cantor() {
    let m = Measure::Tree(cantor(10));
    let c = spectrum_curve(&m, None, &default_q_grid(Backend::Tree), None).unwrap();
    assert!((dim_q(&c, 2.0).unwrap() - log32()).abs() < 1e-9);
    assert!((dim_q(&c, 0.0).unwrap() - log32()).abs() < 1e-9);
    assert!(dim_q(&c, 1.0).is_err());
    let b = spectrum_curve(&Measure::Tree(biased(12)), None, &[2.0], None).unwrap();
    assert!((dim_q(&b, 2.0).unwrap() - 0.4958).abs() < 1e-3);
}

#[test]
fn entropy_dimensions() {
    let c = Measure::Tree(cantor(10));
    let e = entropy_dim(&c, &[0.0], 1.0, None).unwrap();
    assert!((e.lower - log32()).abs() < 0.02 && (e.upper - log32()).abs() < 0.02);
    let b = Measure::Tree(biased(12));
    let oracle = (0.7 * 0.7f64.ln() + 0.3 * 0.3f64.ln()) / (1.0f64 / 3.0).ln();
    let e = entropy_dim(&b, &[0.0], 1.0, None).unwrap();
    assert!((e.slope - oracle).abs() < 1e-9);
    assert!((oracle - 0.5560).abs() < 1e-4);
    let d = Measure::Atomic(AtomicMeasure::dirac(vec![0.0]).unwrap());
    let e = entropy_dim(&d, &[0.0], 1.0, None).unwrap();
    assert_eq!((e.lower, e.upper, e.slope), (0.0, 0.0, 0.0));
}

#[test]
fn local_dimensions_three_ways() {
    let dirac = Measure::Atomic(AtomicMeasure::dirac(vec![0.0]).unwrap());
    let radii: Vec<f64> = (1..10).map(|k| 2f64.powi(-k)).collect();
    let e = local_dim_ball(&dirac, &[0.0], &radii).unwrap();
    assert_eq!((e.min_inc, e.max_inc), (0.0, 0.0));
    let e = local_dim_partition(&dirac, &[0.0], None).unwrap();
    assert!(e.slope.abs() < 1e-12);

    let c = Measure::Tree(cantor(12));
    let radii: Vec<f64> = (2..11).map(|k| 3f64.powi(-k)).collect();
    let e = local_dim_ball(&c, &[0.0], &radii).unwrap();
    assert!((e.min_inc - log32()).abs() < 0.05 && (e.max_inc - log32()).abs() < 0.05);
    let e = local_dim_partition(&c, &[0.0], None).unwrap();
    assert!((e.min_inc - log32()).abs() < 0.05 && (e.max_inc - log32()).abs() < 0.05);

    let leb = Measure::Atomic(lebesgue_proxy(4096, 1).unwrap());
    let radii: Vec<f64> = (2..10).map(|k| 2f64.powi(-k)).collect();
    let e = local_dim_ball(&leb, &[0.5], &radii).unwrap();
    assert!((e.slope - 1.0).abs() < 0.05);
    let e = local_dim_partition(&leb, &[0.3], None).unwrap();
    assert!((e.slope - 1.0).abs() < 0.05);
}

#[test]
fn legendre_of_biased_curve() {
    let m = Measure::Tree(biased(12));
    let qs: Vec<f64> = (-40..=40).map(|k| k as f64 * 0.05).collect();
    let c = spectrum_curve(&m, None, &qs, None).unwrap();
    let alphas = curve_alphas(&c);
    let a1 = alphas.iter().find(|(q, _)| (q - 1.0).abs() < 1e-12).unwrap().1;
    let out = legendre(&c, &[a1]).unwrap();
    assert!((out[0].f - a1).abs() < 1e-9);
    let a0 = alphas.iter().find(|(q, _)| q.abs() < 1e-12).unwrap().1;
    let out = legendre(&c, &[a0]).unwrap();
    assert!((out[0].f - log32()).abs() < 1e-3);
    assert!(!out[0].boundary);
}

#[test]
fn global_min_local_examples() {
    let mix = dirac_plus_lebesgue();
    let pts: Vec<Vec<f64>> = [0.0, 0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|x| vec![*x]).collect();
    let rep = check_global_is_min_local(&mix, 2.0, &pts, 0.05, None).unwrap();
    assert!(rep.gap <= 0.1);
    assert!(rep.locals[0].1.abs() < 0.1);
    assert!((rep.locals[3].1 - 1.0).abs() < 0.1);

    let c = Measure::Tree(cantor(10));
    let t = match &c {
        Measure::Tree(t) => t.clone(),
        _ => unreachable!(),
    };
    let pts: Vec<Vec<f64>> = t.leaves().iter().step_by(200).map(|&l| vec![t.cell(l).rep]).collect();
    let rep = check_global_is_min_local(&c, 2.0, &pts, 0.01, None).unwrap();
    assert!(rep.gap < 1e-9);
    assert!(check_global_is_min_local(&c, 2.0, &pts[..3], 0.01, None).is_err());
}

#[test]
fn global_min_on_mixture() {
    let c = cantor(10);
    let mut xs: Vec<f64> = t_leaves(&c).iter().map(|x| 2.0 + x).collect();
    // S(δ) ≈ a δ + b δ^{0.63}; a light Lebesgue part keeps the crossover
    // above the finite window without changing the limit
    let mut ms = vec![0.95 / 1024.0; 1024];
    for k in 0..1024 {
        xs.push((k as f64 + 0.5) / 1024.0);
        ms.push(0.05 / 1024.0);
    }
    let m = Measure::Atomic(AtomicMeasure::on_line(&xs, ms, true).unwrap());
    let pts: Vec<Vec<f64>> = [0.25, 0.5, 0.75, 2.0, 2.0 + 2.0 / 3.0].iter().map(|x| vec![*x]).collect();
    let rep = check_global_is_min_local(&m, 2.0, &pts, 0.1, None).unwrap();
    assert!((rep.global - log32()).abs() < 0.1, "{}", rep.global);
    assert!(rep.gap < 0.1);
}

fn t_leaves(t: &MeasureTree) -> Vec<f64> {
    t.leaves().iter().map(|&l| t.cell(l).rep).collect()
}

#[test]
fn packing_sums() {
    let d = AtomicMeasure::dirac(vec![0.0]).unwrap();
    for delta in [0.5, 0.01] {
        assert_eq!(s_q_packing(&d, &Point::Coords(vec![0.0]), 1.0, delta, 2.0).unwrap().value, 1.0);
    }
    let c = cantor(10).leaf_measure().unwrap();
    for n in 2..7 {
        let s = s_q_packing(&c, &Point::Coords(vec![0.0]), 1.0, 3f64.powi(-n), 2.0).unwrap();
        let exact = 2f64.powi(-n);
        assert!(s.value > exact / 4.0 && s.value < 4.0 * exact, "n = {n}: {}", s.value);
        assert!(s.value <= s.upper_bound);
    }
    let leb = lebesgue_proxy(4096, 1).unwrap();
    let s = s_q_packing(&leb, &Point::Coords(vec![0.5]), 0.25, 0.01, 0.0).unwrap();
    // centres spaced just over 2δ across [0.25, 0.75]
    assert!((s.value - 25.0).abs() <= 1.0, "{}", s.value);
    assert!(s.value <= s.upper_bound);
    assert!(s_q_packing(&leb, &Point::Coords(vec![0.5]), 0.25, 0.01, -1.0).is_err());
}

#[test]
fn ball_and_partition_agree_on_leaves() {
    let t = tree(&[0.25, 0.5], &[0.4, 0.6], 12);
    let m = Measure::Tree(t.clone());
    let l = ladder(&m).unwrap();
    let leaves = t.leaves();
    for &leaf in leaves.iter().step_by(leaves.len() / 20) {
        let x = [t.cell(leaf).rep];
        let r = dimension_report_on(&m, &l, &x, 0.01, None).unwrap();
        assert!((r.ball.slope - r.part.slope).abs() < 0.1, "{:?}", (r.ball.slope, r.part.slope));
        assert!(r.ldim_ball <= r.udim_ball && r.ldim_part <= r.udim_part);
        assert!(r.entropy_lower <= r.entropy_upper);
    }
}

#[test]
fn abstract_points_space() {
    // atomic measures need coordinates for dyadic cells
    let s = mfdm_metric::appendix_a_space(2).unwrap();
    let n = s.len();
    let m = Measure::Atomic(AtomicMeasure::new(s, vec![1.0; n], true).unwrap());
    assert!(tau_global(&m, 2.0, None).is_err());
    let _ = MetricSpace::line(&[0.0]).unwrap();
}

fn arb_tree() -> impl Strategy<Value = MeasureTree> {
    (2usize..4, any::<u64>()).prop_map(|(m, seed)| {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let r: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..0.9 / m as f64)).collect();
        let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..1.0)).collect();
        let s: f64 = w.iter().sum();
        let p: Vec<f64> = w.iter().map(|x| x / s).collect();
        let depth = if m == 2 { 12 } else { 8 };
        tree(&r, &p, depth)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn curves_are_concave_and_bounded(t in arb_tree()) {
        let m = Measure::Tree(t);
        let c = spectrum_curve(&m, None, &default_q_grid(Backend::Tree), None).unwrap();
        prop_assert!(c.tau_at(1.0).unwrap().abs() <= 1e-9);
        prop_assert!(c.concavity_violations(1e-6).is_empty(), "{:?}", c.concavity_violations(1e-6));
        prop_assert!(c.bound_violations(1e-9).is_empty());
        let dims: Vec<f64> = c.samples.iter().filter(|s| (s.q - 1.0).abs() > 1e-9).map(|s| s.tau / (s.q - 1.0)).collect();
        for d in dims {
            prop_assert!(d <= c.log2_doubling + 1e-9);
        }
    }
}
