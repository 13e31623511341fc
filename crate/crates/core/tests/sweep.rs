//! Exponent sweeps and the tail certificate beyond the explicit grid.

use bessel_hierarchy::hierarchy::stein_tomas_exponent;
use bessel_hierarchy::norms::lower_bound_l0;
use bessel_hierarchy::sweep::{
    p0_report, sweep_d2, sweep_step1, sweep_step2, PUBLISHED_THRESHOLDS,
};
use bessel_hierarchy::{NormEngine, QuadConfig, Status};

fn engine() -> NormEngine {
    NormEngine::new(QuadConfig::default()).unwrap()
}

#[test]
fn d2_short_coarse_sweep_certifies_six() {
    let s = sweep_d2(&engine(), 6.0, 30.0, 0.05).unwrap();
    assert_eq!(s.certified_threshold, Some(6.0));
    assert_eq!(s.status, Status::Pass);
    assert!(s.margins.iter().all(|&m| m > 0.0));
    let tail = s.tail.as_ref().unwrap();
    assert!(tail.holds && tail.margin > 0.0);
    assert!(tail.from_p <= *s.p_grid.last().unwrap() + 1e-12);
}

#[test]
fn thresholds_within_published_bounds() {
    let e = engine();
    for (d, published) in PUBLISHED_THRESHOLDS {
        let r = p0_report(&e, d, 0.01, 60.0).unwrap();
        let t = r.threshold.unwrap();
        assert!(t <= published, "d = {d}: {t} > {published}");
        assert_eq!(r.status, Status::Pass);
    }
}

#[test]
fn halving_the_step_does_not_move_the_threshold_up() {
    let e = engine();
    for d in 3..=10 {
        let coarse = p0_report(&e, d, 0.02, 60.0).unwrap().threshold.unwrap();
        let fine = p0_report(&e, d, 0.01, 60.0).unwrap().threshold.unwrap();
        assert!(fine <= coarse + 1e-12, "d = {d}: {fine} vs {coarse}");
        assert!(coarse - fine <= 0.02 + 1e-12, "d = {d}: {fine} vs {coarse}");
    }
}

#[test]
fn margins_are_consistent_with_l0() {
    let e = engine();
    let s = sweep_step1(&e, 9, 4.0, 20.0, 0.1).unwrap();
    for (&p, &m) in s.p_grid.iter().zip(&s.margins) {
        assert!(m < lower_bound_l0(9, p).unwrap(), "p = {p}");
    }
    let t = s.certified_threshold.unwrap();
    for (&p, &m) in s.p_grid.iter().zip(&s.margins) {
        if p >= t - 1e-12 {
            assert!(m > 0.0, "p = {p}");
        }
    }
}

#[test]
fn step2_grid_spans_pst_to_four() {
    let pst = stein_tomas_exponent(6);
    let s = sweep_step2(&engine(), 6, 0.01).unwrap();
    assert!(s.p_grid.iter().any(|&p| (p - pst).abs() < 1e-12));
    assert!(s.p_grid.iter().any(|&p| (p - 4.0).abs() < 1e-12));
    assert!(s
        .p_grid
        .iter()
        .all(|&p| (pst - 1e-12..=4.0 + 1e-12).contains(&p)));
}

#[test]
fn bad_arguments_are_errors() {
    let e = engine();
    assert!(p0_report(&e, 11, 0.01, 60.0).is_err());
    assert!(p0_report(&e, 5, 0.0, 60.0).is_err());
    assert!(p0_report(&e, 5, -0.1, 60.0).is_err());
}
