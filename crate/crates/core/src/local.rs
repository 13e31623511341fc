//! Second-order analysis at the constant function: the cross integrals
//!
//! ```text
//! M(k) = ∫_0^∞ |J_{d/2-1}(r)|^{p-2} |J_{d/2-1+k}(r)|^2 r^{d-1+p(1-d/2)} dr
//! ```
//!
//! must satisfy `M(k) < Λ(0)^{p-2} Λ(k)^2 < Λ(0)^p` (Hölder, then the argmax
//! hypothesis), and the two ε² coefficient groups
//! `(p-2)(Λ(0)^p - (-1)^k M(k)) + (Λ(0)^p - M(k))` and `Λ(0)^p - M(k)` must be
//! positive for every `k ≥ 1`.
//!
//! Criticality of the constant function (vanishing first-order terms) is an
//! assumption recorded in every record, not a computed fact. The common
//! `(2π)^{pd/2}` normalisation cancels and is never evaluated.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{default_radius, Exponent, NormEngine, NormKey};
use crate::quadrature::{cross_tail_bound, integrate_cross_term, Enclosure};
use crate::record::{compare_less, positive, ClaimId, Status, VerificationRecord, Witness};

/// Number of explicit degrees used to certify the argmax hypothesis.
pub const HYPOTHESIS_K: u32 = 8;

const CRITICALITY_NOTE: &str =
    "assumed: the constant function is a critical point (first-order terms vanish); not verified numerically";

/// Coefficients of the ε² term for a perturbation of degree `k`, evaluated at
/// the worst-case ends of the enclosures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeficitCoefficients {
    pub d: u32,
    pub p: f64,
    pub k: u32,
    pub cross_norm: Enclosure,
    /// `Λ_{d,p}(0)^p`.
    pub lambda0_p: Enclosure,
    /// `(p(p-2)/4)(Λ₀^p - (-1)^k M(k))`.
    pub coeff_real_part: f64,
    /// `(p/4)(Λ₀^p - M(k))`.
    pub coeff_modulus: f64,
    /// `(p-2)(Λ₀^p - (-1)^k M(k)) + (Λ₀^p - M(k))`.
    pub group_combined: f64,
    /// `Λ₀^p - M(k)`.
    pub group_modulus: f64,
}

impl DeficitCoefficients {
    /// Worst-case coefficients from enclosures of `M(k)` and `Λ₀^p`.
    pub fn new(d: u32, p: f64, k: u32, cross_norm: Enclosure, lambda0_p: Enclosure) -> Self {
        let (real_diff, mod_diff) = Self::differences(k, &cross_norm, &lambda0_p, true);
        Self {
            d,
            p,
            k,
            cross_norm,
            lambda0_p,
            coeff_real_part: p * (p - 2.0) / 4.0 * real_diff,
            coeff_modulus: p / 4.0 * mod_diff,
            group_combined: (p - 2.0) * real_diff + mod_diff,
            group_modulus: mod_diff,
        }
    }

    /// `(Λ₀^p - (-1)^k M, Λ₀^p - M)` at the worst (or best) ends.
    fn differences(k: u32, m: &Enclosure, l0: &Enclosure, worst: bool) -> (f64, f64) {
        let (l, m_hi, m_lo) = if worst {
            (l0.lower, m.upper, m.lower)
        } else {
            (l0.upper, m.lower, m.upper)
        };
        let real_diff = if k % 2 == 0 { l - m_hi } else { l + m_lo };
        (real_diff, l - m_hi)
    }

    fn best_case(&self) -> (f64, f64) {
        let (real_diff, mod_diff) =
            Self::differences(self.k, &self.cross_norm, &self.lambda0_p, false);
        ((self.p - 2.0) * real_diff + mod_diff, mod_diff)
    }

    pub fn status(&self) -> Status {
        let (best_combined, best_modulus) = self.best_case();
        positive(self.group_combined, best_combined).and(positive(self.group_modulus, best_modulus))
    }
}

fn finite_exponent(d: u32, p: f64) -> Result<()> {
    NormKey::finite(d, p, 0).map(|_| ())
}

/// Enclosure of `M(k)` on `[0, R]` plus the tail bound.
pub fn cross_norm(engine: &NormEngine, d: u32, p: f64, k: u32, radius: f64) -> Result<Enclosure> {
    finite_exponent(d, p)?;
    let t = integrate_cross_term(d, p, k, radius, engine.quad_config())?;
    Ok(t.with_tail(cross_tail_bound(d, p, k, radius)?))
}

/// `(2π)^{d/2} Λ_{d,p}(0)`, the extension constant at the constant function.
pub fn extension_constant(engine: &NormEngine, d: u32, p: Exponent) -> Result<Enclosure> {
    let v = engine.lambda(NormKey::new(d, p, 0)?)?;
    Ok(v.enclosure.scale((2.0 * PI).powf(f64::from(d) / 2.0)))
}

/// Certifies that `k = 0` maximises `Λ_{d,p}(k)`; records the outcome.
fn check_hypothesis(
    engine: &NormEngine,
    rec: &mut VerificationRecord,
    d: u32,
    p: f64,
) -> Result<()> {
    let best = engine.best_k(d, Exponent::Finite(p), HYPOTHESIS_K)?;
    rec.witness(Witness::real("argmax k", f64::from(best.argmax)));
    rec.witness(Witness::real(
        "argmax domination margin",
        best.domination_margin,
    ));
    if best.status != Status::Pass || best.argmax != 0 {
        rec.require(Status::Inconclusive);
        rec.note(format!(
            "argmax over k not certified at k = 0 (found k = {}, {})",
            best.argmax, best.status
        ));
    }
    Ok(())
}

/// `M(k) < Λ₀^{p-2} Λ_k^2 < Λ₀^p`, with enclosure separation.
pub fn verify_holder_chain(
    engine: &NormEngine,
    d: u32,
    p: f64,
    k: u32,
) -> Result<VerificationRecord> {
    finite_exponent(d, p)?;
    if k == 0 {
        return Err(Error::domain("the Hölder chain is stated for k >= 1"));
    }
    let mut rec = VerificationRecord::new(ClaimId::HolderChain)
        .param("d", f64::from(d))
        .param("p", p)
        .param("k", f64::from(k));
    rec.note(CRITICALITY_NOTE);
    check_hypothesis(engine, &mut rec, d, p)?;

    let radius = default_radius(d, k);
    let m = cross_norm(engine, d, p, k, radius)?;
    let l0 = power_of(engine, d, p, 0)?;
    let lk = power_of(engine, d, p, k)?;
    let holder = l0.powf((p - 2.0) / p).mul(lk.powf(2.0 / p));

    rec.witness(Witness::enclosure(format!("M(k={k})"), m));
    rec.witness(Witness::enclosure("Λ^p(0)", l0));
    rec.witness(Witness::enclosure(format!("Λ^p(k={k})"), lk));
    rec.witness(Witness::enclosure("Λ(0)^{p-2} Λ(k)^2", holder));
    rec.require(compare_less(&m, &holder));
    rec.require(compare_less(&holder, &l0));
    rec.k_explicit = k;
    rec.k_dominated_from = k + 1;
    rec.note(format!(
        "single degree k = {k}; other degrees are separate records"
    ));
    Ok(rec)
}

/// Both ε² coefficient groups positive for `k = 1..=K`.
pub fn verify_second_order_positivity(
    engine: &NormEngine,
    d: u32,
    p: f64,
    k_max: u32,
) -> Result<(VerificationRecord, Vec<DeficitCoefficients>)> {
    finite_exponent(d, p)?;
    if k_max == 0 {
        return Err(Error::domain("local coefficients need K >= 1"));
    }
    let mut rec = VerificationRecord::new(ClaimId::LocalCoefficients)
        .param("d", f64::from(d))
        .param("p", p)
        .param("K", f64::from(k_max));
    rec.note(CRITICALITY_NOTE);
    rec.note("k = 0 excluded: it is the normalisation direction");
    check_hypothesis(engine, &mut rec, d, p)?;

    let l0 = power_of(engine, d, p, 0)?;
    let coeffs = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let m = cross_norm(engine, d, p, k, default_radius(d, k))?;
            Ok(DeficitCoefficients::new(d, p, k, m, l0))
        })
        .collect::<Result<Vec<_>>>()?;
    for c in &coeffs {
        rec.witness(Witness::enclosure(format!("M(k={})", c.k), c.cross_norm));
        rec.witness(Witness::real(
            format!("combined group k={}", c.k),
            c.group_combined,
        ));
        rec.witness(Witness::real(
            format!("modulus group k={}", c.k),
            c.group_modulus,
        ));
        rec.require(c.status());
    }
    rec.witness(Witness::enclosure("Λ^p(0)", l0));
    rec.k_explicit = k_max;
    rec.k_dominated_from = k_max + 1;
    rec.note(format!("degrees k > {k_max} are not checked"));
    Ok((rec, coeffs))
}

fn power_of(engine: &NormEngine, d: u32, p: f64, k: u32) -> Result<Enclosure> {
    let v = engine.lambda_finite(NormKey::finite(d, p, k)?, default_radius(d, k))?;
    v.power
        .ok_or_else(|| Error::domain("finite exponent without a power enclosure"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadConfig;

    #[test]
    fn point_enclosures_reduce_to_formulas() {
        let (l0, m) = (0.3, 0.1);
        let p = 6.0;
        for k in 1..=4u32 {
            let c = DeficitCoefficients::new(2, p, k, Enclosure::point(m), Enclosure::point(l0));
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let real = l0 - sign * m;
            assert!((c.coeff_real_part - p * (p - 2.0) / 4.0 * real).abs() < 1e-15);
            assert!((c.coeff_modulus - p / 4.0 * (l0 - m)).abs() < 1e-15);
            assert!((c.group_combined - ((p - 2.0) * real + (l0 - m))).abs() < 1e-15);
            assert_eq!(c.status(), Status::Pass);
        }
        // even k: the combined group is (p-1)(Λ₀^p - M)
        let c = DeficitCoefficients::new(2, p, 2, Enclosure::point(m), Enclosure::point(l0));
        assert!((c.group_combined - (p - 1.0) * (l0 - m)).abs() < 1e-15);
        let bad = DeficitCoefficients::new(2, p, 2, Enclosure::point(0.4), Enclosure::point(l0));
        assert_eq!(bad.status(), Status::Fail);
    }

    #[test]
    fn extension_constant_closed_forms() {
        let e = NormEngine::new(QuadConfig::default()).unwrap();
        let c = extension_constant(&e, 2, Exponent::Infinity).unwrap();
        assert!((c.midpoint() - 2.0 * PI).abs() < 1e-12);
        let c = extension_constant(&e, 4, Exponent::Infinity).unwrap();
        assert!((c.midpoint() - 0.5 * (2.0 * PI).powi(2)).abs() < 1e-11);
    }

    #[test]
    fn cross_norm_k0_matches_power() {
        let e = NormEngine::new(QuadConfig::default()).unwrap();
        let m = cross_norm(&e, 3, 4.0, 0, 200.0).unwrap();
        let l = power_of(&e, 3, 4.0, 0).unwrap();
        assert!((m.lower - l.lower).abs() < 1e-12 && (m.upper - l.upper).abs() < 1e-12);
    }
}
