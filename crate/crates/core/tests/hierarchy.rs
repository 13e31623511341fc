//! Degree hierarchies: explicit comparisons plus domination of all large k.

use bessel_hierarchy::hierarchy::{
    stein_tomas_exponent, verify_p4, verify_pst, verify_sup_monotone,
};
use bessel_hierarchy::{NormEngine, QuadConfig, Status, VerificationRecord};

fn engine() -> NormEngine {
    NormEngine::new(QuadConfig::default()).unwrap()
}

#[test]
fn p4_domination_thresholds() {
    let e = engine();
    let expected = [
        (3, 5),
        (4, 3),
        (5, 2),
        (6, 2),
        (7, 2),
        (8, 2),
        (9, 3),
        (10, 3),
    ];
    for (d, k0) in expected {
        let r = verify_p4(&e, d).unwrap();
        assert_eq!(r.status, Status::Pass, "d = {d}: {:?}", r.notes);
        assert_eq!(r.k_dominated_from, k0, "d = {d}");
        assert_eq!(r.k_explicit, k0 - 1);
    }
}

#[test]
fn pst_domination_thresholds() {
    let e = engine();
    for d in 4..=10 {
        let r = verify_pst(&e, d).unwrap();
        assert_eq!(r.status, Status::Pass, "d = {d}: {:?}", r.notes);
        assert_eq!(r.k_dominated_from, if d == 4 { 4 } else { 3 }, "d = {d}");
        assert_eq!(r.params["p"], stein_tomas_exponent(d));
    }
}

#[test]
fn sup_hierarchy_is_strict() {
    let e = engine();
    for d in 2..=10 {
        let r = verify_sup_monotone(&e, d, 30).unwrap();
        assert_eq!(r.status, Status::Pass, "d = {d}");
        let gaps: Vec<f64> = (1..=30)
            .map(|k| r.witness_value(&format!("gap k={k}")).unwrap())
            .collect();
        assert!(gaps.iter().all(|&g| g > 1e-9));
    }
}

#[test]
fn records_round_trip_through_json() {
    let r = verify_p4(&engine(), 5).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let back: VerificationRecord = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    assert!(json.contains("\"status\":\"PASS\""));
}

#[test]
fn out_of_scope_dimensions_are_errors() {
    let e = engine();
    assert!(verify_p4(&e, 2).is_err());
    assert!(verify_p4(&e, 11).is_err());
    assert!(verify_pst(&e, 3).is_err());
    assert!(verify_sup_monotone(&e, 1, 30).is_err());
}
