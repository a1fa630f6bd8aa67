mod oracle;

use oracle::*;

#[test]
fn rgg_edges_and_components_match_brute_force() {
    let (edges, comps) = check_rgg_and_components(100);
    assert_eq!(edges.mismatches, 0, "{edges:?}");
    assert_eq!(comps.mismatches, 0, "{comps:?}");
    assert!(comps.positives > 50);
}

#[test]
fn crossing_matches_path_enumeration() {
    let t = check_crossing(200);
    assert_eq!(t.mismatches, 0, "{t:?}");
    // both outcomes occur
    assert!(t.positives > 20 && t.positives < t.cases - 20, "{t:?}");
}

#[test]
fn surrounding_circuit_matches_winding_oracle() {
    let t = check_surrounding(100);
    assert_eq!(t.mismatches, 0, "{t:?}");
    assert!(t.positives > 5 && t.positives < t.cases - 5, "{t:?}");
}

#[test]
fn k_component_matches_exhaustive() {
    let t = check_k_component(1000);
    assert_eq!(t.mismatches, 0, "{t:?}");
}

#[test]
fn disjoint_crossings_match_min_cut() {
    let t = check_disjoint_crossings(1000);
    assert_eq!(t.mismatches, 0, "{t:?}");
    assert!(t.positives > 100);
}

#[test]
fn segment_oracle_agrees_with_library_predicate() {
    use contperc::geometry::{segment_intersects, Point};
    use rand::Rng;
    let mut r = rng(9);
    // integer coordinates make touching and collinear cases common
    for _ in 0..20_000 {
        let mut p = || Point::new(r.random_range(0..5) as f64, r.random_range(0..5) as f64);
        let (a, b, c, d) = (p(), p(), p(), p());
        assert_eq!(segment_intersects(a, b, c, d), segments_meet(a, b, c, d), "{a:?} {b:?} {c:?} {d:?}");
    }
}
