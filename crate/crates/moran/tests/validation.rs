use mfdm_measures::MeasureTree;
use mfdm_moran::*;

fn cantor(depth: usize) -> MeasureTree {
    let s = SelfSimilarSpec::uniform(vec![1.0 / 3.0; 2]).unwrap();
    build_selfsimilar_tree(&s, depth).unwrap()
}

#[test]
fn cantor_tree_passes_everything() {
    let s = SelfSimilarSpec::uniform(vec![1.0 / 3.0; 2]).unwrap();
    let t = cantor(10);
    let v = validate_moran(&t, Some(&s)).unwrap();
    for c in &v.checks {
        assert!(c.pass, "{} failed: {:?} value {}", c.name, c.witness, c.value);
    }
    assert!((v.c0 - 0.5).abs() < 1e-9);
    assert!((v.c1 - 3.0).abs() < 1e-9);
    // without a spec the ratios are read off the tree
    assert!(validate_moran(&t, None).unwrap().all_pass());
}

#[test]
fn overlapping_children_fail_m2() {
    let mut t = MeasureTree::new(0.0, 1.0, 1.0).unwrap();
    t.add_child(0, 0.0, 0.6, 0.5).unwrap();
    t.add_child(0, 0.4, 1.0, 0.5).unwrap();
    let v = validate_moran(&t, None).unwrap();
    let m2 = v.get("M2").unwrap();
    assert!(!m2.pass);
    assert!(m2.witness.as_deref().unwrap().contains("1 and 2"));
    assert!(v.get("M1").unwrap().pass);
}

#[test]
fn escaping_child_fails_m1() {
    let mut t = MeasureTree::new(0.0, 1.0, 1.0).unwrap();
    let a = t.add_child(0, 0.0, 0.3, 0.5).unwrap();
    t.add_child(0, 0.6, 1.0, 0.5).unwrap();
    t.add_child(a, 0.2, 0.5, 0.5).unwrap();
    let v = validate_moran(&t, None).unwrap();
    assert!(!v.get("M1").unwrap().pass);
}

#[test]
fn abstract_tree_is_unsupported() {
    let t = MeasureTree::new_abstract(1.0, 1.0).unwrap();
    assert!(validate_moran(&t, None).is_err());
}

#[test]
fn halves_build_touching_leaves() {
    let s = SelfSimilarSpec::uniform(vec![0.5, 0.5]).unwrap();
    let t = build_selfsimilar_tree(&s, 3).unwrap();
    let leaves = t.leaves();
    assert_eq!(leaves.len(), 8);
    for &l in &leaves {
        assert!((t.cell(l).mass - 0.125).abs() < 1e-15);
        assert!((t.cell(l).diam() - 0.125).abs() < 1e-15);
    }
    // nested diameters (1/2)^n fill [0,1] exactly, so siblings cannot be separated
    assert!(!validate_moran(&t, Some(&s)).unwrap().get("M2").unwrap().pass);
}

#[test]
fn biased_depth_twelve() {
    let s = SelfSimilarSpec::new(vec![1.0 / 3.0; 2], vec![0.7, 0.3]).unwrap();
    let t = build_selfsimilar_tree(&s, 12).unwrap();
    let leaves = t.leaves();
    assert_eq!(leaves.len(), 4096);
    let mx = leaves.iter().map(|&l| t.cell(l).mass).fold(0.0, f64::max);
    assert!((mx - 0.7f64.powi(12)).abs() < 1e-15);
    let total: f64 = leaves.iter().map(|&l| t.cell(l).mass).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let v = validate_moran(&t, Some(&s)).unwrap();
    assert!(v.all_pass(), "{:?}", v.failures());
}

#[test]
fn unequal_ratios_pass() {
    let s = SelfSimilarSpec::new(vec![0.25, 0.5], vec![0.5, 0.5]).unwrap();
    let t = build_selfsimilar_tree(&s, 10).unwrap();
    let v = validate_moran(&t, Some(&s)).unwrap();
    assert!(v.all_pass(), "{:?}", v.failures());
    assert!((v.c1 - 4.0).abs() < 1e-9);
}

#[test]
fn mixed_spec_converges() {
    let s = SelfSimilarSpec::new(vec![0.3, 0.3], vec![0.6, 0.4])
        .unwrap()
        .with_mixing(vec![0.2, 0.4], vec![0.5, 0.5], 12)
        .unwrap();
    let t = build_selfsimilar_tree(&s, 12).unwrap();
    let v = validate_moran(&t, Some(&s)).unwrap();
    assert!(v.get("M6").unwrap().pass, "{:?}", v.get("M6"));
    assert!(v.get("M7").unwrap().pass);
}
