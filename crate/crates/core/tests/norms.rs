//! Norm engine: closed forms, pointwise and interpolation bounds, and the
//! decreasing majorant used for domination.

use std::f64::consts::PI;

use bessel_hierarchy::norms::{
    lambda4_zero, lambda_sup_zero_closed, lower_bound_l0, sup_decay_bound, u_strip, upper_bound_u,
    weighted_l2_identity,
};
use bessel_hierarchy::specfun::bessel_j;
use bessel_hierarchy::{BesselOrder, Exponent, NormEngine, NormKey, QuadConfig};
use proptest::prelude::*;

fn engine() -> NormEngine {
    NormEngine::new(QuadConfig::default()).unwrap()
}

fn profile(d: u32, k: u32, r: f64) -> f64 {
    let nu = BesselOrder::for_degree(d, k).unwrap();
    bessel_j(nu, r).unwrap() * r.powf(1.0 - f64::from(d) / 2.0)
}

#[test]
fn closed_form_oracles() {
    // ν = 1/2, λ = 1: ∫ J_{1/2}² / r = (2/π) ∫ sin² r / r² = 1
    let v = weighted_l2_identity(BesselOrder::from_twice(1), 1.0).unwrap();
    assert!((v - 1.0).abs() < 1e-12, "{v}");
    assert!((lambda4_zero(3).unwrap().powi(4) - 1.0 / PI).abs() < 1e-10);
    let e = engine();
    let l = e
        .lambda_finite(NormKey::finite(3, 4.0, 0).unwrap(), 200.0)
        .unwrap();
    assert!(l.power.unwrap().contains(1.0 / PI), "{:?}", l.power);
}

#[test]
fn lambda4_zero_inside_quadrature_enclosures() {
    let e = engine();
    for d in 3..=10 {
        let exact = lambda4_zero(d).unwrap();
        let v = e.lambda_default(d, 4.0, 0).unwrap();
        assert!(
            v.enclosure.contains(exact),
            "d = {d}: {exact} not in {:?}",
            v.enclosure
        );
    }
}

#[test]
fn sup_at_zero_is_value_at_origin() {
    for d in 2..=10 {
        let c = lambda_sup_zero_closed(d);
        let near = profile(d, 0, 1e-6);
        assert!((c - near).abs() < 1e-9 * c, "d = {d}");
        let v = engine().lambda_sup(d, 0).unwrap();
        assert!(v.enclosure.contains(c));
    }
}

#[test]
fn u_decreases_in_k() {
    for d in 2..=10 {
        let (lo, hi) = u_strip(d);
        for p in [lo + 0.01, 0.5 * (lo + hi), hi - 0.01] {
            let us: Vec<f64> = (1..=50).map(|k| upper_bound_u(d, p, k).unwrap()).collect();
            assert!(us.windows(2).all(|w| w[1] < w[0]), "d = {d}, p = {p}");
        }
    }
}

#[test]
fn quadrature_values_respect_u_bound() {
    let e = engine();
    for d in 2..=10 {
        let (lo, hi) = u_strip(d);
        let p_min = lo.max(2.0 * f64::from(d) / (f64::from(d) - 1.0));
        for p in [p_min + 0.05, 0.5 * (p_min + hi)] {
            for k in 1..=6 {
                let v = e.lambda_default(d, p, k).unwrap();
                let u = upper_bound_u(d, p, k).unwrap().powf(1.0 / p);
                assert!(
                    v.enclosure.lower <= u * (1.0 + 1e-9),
                    "d = {d}, p = {p}, k = {k}"
                );
            }
        }
    }
}

#[test]
fn l0_is_a_lower_bound() {
    let e = engine();
    for d in 2..=10 {
        let pc = 2.0 * f64::from(d) / (f64::from(d) - 1.0);
        for p in [pc + 0.2, pc + 1.0, 6.0, 10.0] {
            let v = e.lambda_default(d, p, 0).unwrap();
            assert!(
                lower_bound_l0(d, p).unwrap() <= v.enclosure.upper,
                "d = {d}, p = {p}"
            );
        }
    }
}

#[test]
fn sup_decay_bound_dominates_true_sup() {
    let e = engine();
    for d in 2..=10 {
        for k in [1, 2, 5, 10, 20] {
            let v = e.lambda_sup(d, k).unwrap();
            assert!(
                v.enclosure.upper <= sup_decay_bound(d, k).unwrap(),
                "d = {d}, k = {k}"
            );
        }
    }
}

#[test]
fn best_k_is_zero_for_sup_and_p4() {
    let e = engine();
    for d in 2..=10 {
        let b = e.best_k(d, Exponent::Infinity, 20).unwrap();
        assert_eq!(b.argmax, 0);
    }
    let b = e.best_k(3, Exponent::Finite(4.0), 8).unwrap();
    assert_eq!(b.argmax, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sup_dominates_pointwise(d in 2u32..=10, k in 0u32..=12, r in 0.01f64..300.0) {
        let v = engine().lambda_sup(d, k).unwrap();
        prop_assert!(profile(d, k, r).abs() <= v.enclosure.upper * (1.0 + 1e-12));
    }

    /// `Λ_p ≤ Λ_{p0}^{p0/p} Λ_∞^{1-p0/p}` for `p > p0`.
    #[test]
    fn interpolation_with_sup_is_sound(d in 2u32..=8, k in 0u32..=4, extra in 0.1f64..6.0) {
        let e = engine();
        let p0 = 2.0 * f64::from(d) / (f64::from(d) - 1.0) + 0.25;
        let p = p0 + extra;
        let a = e.lambda_default(d, p0, k).unwrap().enclosure;
        let s = e.lambda_sup(d, k).unwrap().enclosure;
        let v = e.lambda_default(d, p, k).unwrap().enclosure;
        let bound = a.upper.powf(p0 / p) * s.upper.powf(1.0 - p0 / p);
        prop_assert!(v.lower <= bound * (1.0 + 1e-12), "{} > {bound}", v.lower);
    }
}

#[test]
fn memo_export_import_preserves_enclosures() {
    let e = engine();
    let a = e.lambda_default(4, 3.5, 2).unwrap();
    let s = e.lambda_sup(5, 3).unwrap();
    let entries = e.export();
    let json = serde_json::to_string(&entries).unwrap();
    let fresh = engine();
    assert_eq!(
        fresh.import(serde_json::from_str::<Vec<_>>(&json).unwrap()),
        entries.len()
    );
    assert_eq!(fresh.lambda_default(4, 3.5, 2).unwrap(), a);
    assert_eq!(fresh.lambda_sup(5, 3).unwrap(), s);
}

#[test]
fn rejects_inadmissible_keys() {
    assert!(NormKey::finite(2, 4.0, 0).is_err());
    assert!(NormKey::finite(3, 2.5, 0).is_err());
    assert!(NormKey::finite(1, 8.0, 0).is_err());
    assert!(NormKey::sup(3, 500).is_err());
    assert!(upper_bound_u(3, 100.0, 1).is_err());
    assert!(weighted_l2_identity(BesselOrder::from_twice(1), 2.5).is_err());
}
