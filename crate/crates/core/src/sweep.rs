//! Exponent sweeps: for each `p` on a grid, an interpolation upper bound on
//! `Λ_{d,p}(k)`, `k ≥ 1`, is compared against the lower bound on `Λ_{d,p}(0)`.
//! The smallest grid point from which every margin is positive is the
//! certified threshold.
//!
//! Regimes with an infinite range close the grid with a tail certificate on
//! `[P, ∞)`. Both sides have the form `exp(a + b(p)/p)`:
//!
//! - upper bound: `ln u(p) = α + β/p`, so `sup_{p ≥ P} ln u = α + max(β/P, 0)`;
//! - lower bound: `ln L0(p) = c0 + (c1 + lnΓ(p+1) - lnΓ(p+a+1))/p` with
//!   `a = d/2`. Since `lnΓ(x+a) - lnΓ(x) ≤ a ln(x+a)`, it is at least
//!   `c0 + h(p)`, `h(p) = (c1 - a ln(p+1+a))/p`, and `h` is increasing once
//!   `a ln(p+1+a) ≥ c1 + a`, so `inf_{p ≥ P} ≥ c0 + h(P)` there.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{stein_tomas_exponent, P4_RADII};
use crate::norms::{default_radius, l0_constants, l0_ln, NormEngine, NormKey};
use crate::quadrature::tail_bound;
use crate::record::Status;

/// Default grid spacing.
pub const DEFAULT_STEP: f64 = 0.01;
/// Default end of the explicit grid for infinite ranges.
pub const DEFAULT_P_MAX: f64 = 60.0;
/// A margin counts as positive only above this floor.
pub const MARGIN_FLOOR: f64 = 1e-8;

/// Published upper bounds on `p₀(d)`, `d = 2..=10`.
pub const PUBLISHED_THRESHOLDS: [(u32, f64); 9] = [
    (2, 6.0),
    (3, 4.0),
    (4, 3.48),
    (5, 3.50),
    (6, 3.58),
    (7, 3.7),
    (8, 3.86),
    (9, 4.06),
    (10, 4.46),
];

pub fn published_threshold(d: u32) -> Option<f64> {
    PUBLISHED_THRESHOLDS
        .iter()
        .find(|(dd, _)| *dd == d)
        .map(|&(_, t)| t)
}

/// Threshold published for one regime on its own.
fn regime_published_threshold(d: u32, regime: Regime) -> Option<f64> {
    match regime {
        Regime::D2SixInf => (d == 2).then_some(6.0),
        Regime::Step1FourInf => match d {
            3..=8 => Some(4.0),
            9 | 10 => published_threshold(d),
            _ => None,
        },
        Regime::Step2PstFour => (4..=8)
            .contains(&d)
            .then(|| published_threshold(d))
            .flatten(),
    }
}

/// Interpolation pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `d = 2`, between `p = 6` and `p = ∞`.
    #[serde(rename = "D2_SIX_INF")]
    D2SixInf,
    /// `3 ≤ d ≤ 10`, between `p = 4` and `p = ∞`.
    #[serde(rename = "STEP1_FOUR_INF")]
    Step1FourInf,
    /// `4 ≤ d ≤ 8`, between `p_st` and `p = 4`.
    #[serde(rename = "STEP2_PST_FOUR")]
    Step2PstFour,
}

/// Certificate that the margin stays positive on `[from_p, ∞)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailCertificate {
    pub from_p: f64,
    /// Lower bound on `inf_{p ≥ from_p} L0(d,p)`.
    pub lower_inf: f64,
    /// Upper bound on `sup_{p ≥ from_p}` of the interpolation bound.
    pub upper_sup: f64,
    pub margin: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub d: u32,
    pub regime: Regime,
    pub step: f64,
    pub p_grid: Vec<f64>,
    /// `L0(d,p) - upper bound(p)` per grid point.
    pub margins: Vec<f64>,
    /// Smallest grid `p` from which every margin (and the tail certificate,
    /// if any) is positive; `None` if the last point already fails.
    pub certified_threshold: Option<f64>,
    pub published_threshold: Option<f64>,
    /// Upper ends of the norms entering the bound.
    pub inputs: BTreeMap<String, f64>,
    /// `Λ_{d,∞}(0) - Λ_{d,∞}(1)` (upper end) for infinite ranges.
    pub limit_margin: Option<f64>,
    pub tail: Option<TailCertificate>,
    pub status: Status,
}

/// Upper bound of the form `ln u(p) = α + β/p`.
#[derive(Clone, Copy, Debug)]
struct LogLinear {
    alpha: f64,
    beta: f64,
}

impl LogLinear {
    fn ln_at(&self, p: f64) -> f64 {
        self.alpha + self.beta / p
    }
}

/// Grid points `start, start + step, …` up to `end` (inclusive, within
/// rounding). Points are computed as `n/m` when `step = 1/m`, so they land
/// on round decimals.
fn ascending_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let inv = 1.0 / step;
    let exact = (inv - inv.round()).abs() < 1e-9 && inv.round() > 0.0;
    let n = ((end - start) / step + 1e-9).floor().max(0.0) as usize;
    (0..=n)
        .map(|i| {
            if exact {
                ((start * inv).round() + i as f64) / inv.round()
            } else {
                start + i as f64 * step
            }
        })
        .collect()
}

fn validate_step(step: f64) -> Result<()> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::domain(format!(
            "grid step must lie in (0, 1], got {step}"
        )));
    }
    Ok(())
}

fn margins_on(d: u32, grid: &[f64], bound: impl Fn(f64) -> f64 + Sync) -> Vec<f64> {
    grid.par_iter()
        .map(|&p| l0_ln(d, p).exp() - bound(p))
        .collect()
}

/// Index from which all margins exceed the floor.
fn first_stable(margins: &[f64]) -> Option<usize> {
    let mut idx = None;
    for i in (0..margins.len()).rev() {
        if margins[i] > MARGIN_FLOOR {
            idx = Some(i);
        } else {
            break;
        }
    }
    idx
}

/// Point beyond which `h(p)` is increasing.
fn monotone_from(d: u32) -> f64 {
    let (_, c1) = l0_constants(d);
    let a = f64::from(d) / 2.0;
    ((c1 + a) / a).exp() - 1.0 - a
}

fn tail_certificate(d: u32, from_p: f64, upper: LogLinear) -> TailCertificate {
    let (c0, c1) = l0_constants(d);
    let a = f64::from(d) / 2.0;
    let h = (c1 - a * (from_p + 1.0 + a).ln()) / from_p;
    let lower_inf = (c0 + h).exp();
    let upper_sup = (upper.alpha + (upper.beta / from_p).max(0.0)).exp();
    let margin = lower_inf - upper_sup;
    TailCertificate {
        from_p,
        lower_inf,
        upper_sup,
        margin,
        holds: margin > MARGIN_FLOOR && from_p >= monotone_from(d),
    }
}

/// Shared driver for the two infinite-range regimes.
fn sweep_to_infinity(
    d: u32,
    regime: Regime,
    p_min: f64,
    p_max: f64,
    step: f64,
    upper: LogLinear,
    sup_zero: f64,
    sup_one: f64,
    inputs: BTreeMap<String, f64>,
) -> Result<SweepResult> {
    validate_step(step)?;
    if !(p_max >= p_min) || !p_max.is_finite() {
        return Err(Error::domain(format!(
            "need p_min <= p_max < ∞, got [{p_min}, {p_max}]"
        )));
    }
    // Extend the explicit grid until the tail certificate's monotonicity holds.
    let wanted = p_max.max(monotone_from(d));
    let end = p_min + ((wanted - p_min) / step - 1e-9).ceil().max(0.0) * step;
    let p_grid = ascending_grid(p_min, end + 0.5 * step, step);
    let margins = margins_on(d, &p_grid, |p| upper.ln_at(p).exp());
    let last = *p_grid.last().unwrap_or(&p_min);
    let tail = tail_certificate(d, last.max(monotone_from(d)), upper);
    let limit_margin = sup_zero - sup_one;

    let certified_threshold = if tail.holds && limit_margin > 0.0 {
        first_stable(&margins).map(|i| p_grid[i])
    } else {
        None
    };
    let published_threshold = regime_published_threshold(d, regime);
    let status = threshold_status(certified_threshold, published_threshold);
    Ok(SweepResult {
        d,
        regime,
        step,
        p_grid,
        margins,
        certified_threshold,
        published_threshold,
        inputs,
        limit_margin: Some(limit_margin),
        tail: Some(tail),
        status,
    })
}

fn threshold_status(certified: Option<f64>, published: Option<f64>) -> Status {
    match (certified, published) {
        (Some(t), Some(published)) if t <= published + 1e-12 => Status::Pass,
        (Some(_), None) => Status::Pass,
        (Some(_), Some(_)) => Status::Fail,
        (None, _) => Status::Inconclusive,
    }
}

/// `d = 2`: `Λ_{2,p}(k) ≤ (1/3)^{1/p} Λ_{2,6}(0)^{6/p} Λ_{2,∞}(1)^{1-6/p}` for
/// `k ≥ 1`, `p ≥ 6`, where `1/3` bounds `Λ_{2,6}(k)^6/Λ_{2,6}(0)^6` for `k ≥ 1`.
pub fn sweep_d2(engine: &NormEngine, p_min: f64, p_max: f64, step: f64) -> Result<SweepResult> {
    if !(p_min >= 6.0) {
        return Err(Error::domain(format!(
            "d = 2 sweep needs p_min >= 6, got {p_min}"
        )));
    }
    let six = engine
        .lambda_default(2, 6.0, 0)?
        .power
        .expect("finite exponent has a power enclosure");
    let s = engine.lambda_sup(2, 1)?.enclosure.upper;
    let z = engine.lambda_sup(2, 0)?.enclosure.lower;
    let upper = LogLinear {
        alpha: s.ln(),
        beta: -(3f64.ln()) + six.upper.ln() - 6.0 * s.ln(),
    };
    let inputs = BTreeMap::from([
        ("Λ^6(0) upper, d=2".to_owned(), six.upper),
        ("Λ_∞(1) upper".to_owned(), s),
        ("ratio constant".to_owned(), 1.0 / 3.0),
    ]);
    sweep_to_infinity(2, Regime::D2SixInf, p_min, p_max, step, upper, z, s, inputs)
}

/// Upper end of `Λ_{d,4}(1)^4` from the `[0,40]` truncation plus tail.
fn lambda4_one_upper(engine: &NormEngine, d: u32) -> Result<f64> {
    let t = engine.truncated_power(d, 4.0, 1, P4_RADII.short)?;
    Ok(t.with_tail(tail_bound(d, 4.0, 1, P4_RADII.short)?).upper)
}

/// `Λ_{d,p}(k) ≤ Λ_{d,4}(1)^{4/p} Λ_{d,∞}(1)^{1-4/p}` for `k ≥ 1`, `p ≥ 4`.
pub fn sweep_step1(
    engine: &NormEngine,
    d: u32,
    p_min: f64,
    p_max: f64,
    step: f64,
) -> Result<SweepResult> {
    if !(3..=10).contains(&d) {
        return Err(Error::domain(format!(
            "step-1 sweep needs d = 3..10, got {d}"
        )));
    }
    if !(p_min >= 4.0) {
        return Err(Error::domain(format!(
            "step-1 sweep needs p_min >= 4, got {p_min}"
        )));
    }
    let a = lambda4_one_upper(engine, d)?;
    let s = engine.lambda_sup(d, 1)?.enclosure.upper;
    let z = engine.lambda_sup(d, 0)?.enclosure.lower;
    let upper = LogLinear {
        alpha: s.ln(),
        beta: a.ln() - 4.0 * s.ln(),
    };
    let inputs = BTreeMap::from([
        ("Λ^4(1) upper".to_owned(), a),
        ("Λ_∞(1) upper".to_owned(), s),
    ]);
    sweep_to_infinity(
        d,
        Regime::Step1FourInf,
        p_min,
        p_max,
        step,
        upper,
        z,
        s,
        inputs,
    )
}

/// Interpolation weight on `Λ_{d,4}(1)` at exponent `p ∈ [p_st, 4]`.
pub fn theta(d: u32, p: f64) -> f64 {
    let pst = stein_tomas_exponent(d);
    (4.0 / p) * (p - pst) / (4.0 - pst)
}

/// `Λ_{d,p}(k) ≤ Λ_{d,p_st}(1)^{1-θ} Λ_{d,4}(1)^θ` for `k ≥ 1`, `p ∈ [p_st, 4]`.
/// The grid is anchored at `p = 4` and steps down to `p_st`, which is
/// included.
pub fn sweep_step2(engine: &NormEngine, d: u32, step: f64) -> Result<SweepResult> {
    if !(4..=8).contains(&d) {
        return Err(Error::domain(format!(
            "step-2 sweep needs d = 4..8, got {d}"
        )));
    }
    validate_step(step)?;
    let pst = stein_tomas_exponent(d);
    let a4 = lambda4_one_upper(engine, d)?.powf(0.25);
    let bst = engine
        .lambda_finite(NormKey::finite(d, pst, 1)?, default_radius(d, 1))?
        .enclosure
        .upper;

    let mut p_grid: Vec<f64> = ascending_grid(4.0 - step * ((4.0 - pst) / step).floor(), 4.0, step);
    if p_grid.first().is_some_and(|&p| p - pst > 1e-12) {
        p_grid.insert(0, pst);
    }
    let margins = margins_on(d, &p_grid, |p| {
        let th = theta(d, p).clamp(0.0, 1.0);
        bst.powf(1.0 - th) * a4.powf(th)
    });
    let certified_threshold = first_stable(&margins).map(|i| p_grid[i]);
    let published_threshold = regime_published_threshold(d, Regime::Step2PstFour);
    let inputs = BTreeMap::from([
        ("Λ_4(1) upper".to_owned(), a4),
        ("Λ_pst(1) upper".to_owned(), bst),
        ("p_st".to_owned(), pst),
    ]);
    Ok(SweepResult {
        d,
        regime: Regime::Step2PstFour,
        step,
        p_grid,
        margins,
        certified_threshold,
        published_threshold,
        inputs,
        limit_margin: None,
        tail: None,
        status: threshold_status(certified_threshold, published_threshold),
    })
}

/// Combined threshold for one dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct P0Report {
    pub d: u32,
    pub threshold: Option<f64>,
    pub published_threshold: f64,
    pub status: Status,
    pub sweeps: Vec<SweepResult>,
}

/// Certified upper bound on `p₀(d)` for `2 ≤ d ≤ 10`, stitching step 1 and
/// step 2 at `p = 4` for `4 ≤ d ≤ 8`.
pub fn p0_report(engine: &NormEngine, d: u32, step: f64, p_max: f64) -> Result<P0Report> {
    let published = published_threshold(d)
        .ok_or_else(|| Error::domain(format!("p0 report needs d = 2..10, got {d}")))?;
    let (threshold, sweeps) = match d {
        2 => {
            let s = sweep_d2(engine, 6.0, p_max, step)?;
            (s.certified_threshold, vec![s])
        }
        3 | 9 | 10 => {
            let s = sweep_step1(engine, d, 4.0, p_max, step)?;
            (s.certified_threshold, vec![s])
        }
        _ => {
            let s1 = sweep_step1(engine, d, 4.0, p_max, step)?;
            let s2 = sweep_step2(engine, d, step)?;
            let t = match (s1.certified_threshold, s2.certified_threshold) {
                // step 1 holds from the seam, so step 2 extends it downward
                (Some(t1), Some(t2)) if (t1 - 4.0).abs() < 1e-12 => Some(t2.min(4.0)),
                (t1, _) => t1,
            };
            (t, vec![s1, s2])
        }
    };
    let status = threshold_status(threshold, Some(published));
    Ok(P0Report {
        d,
        threshold,
        published_threshold: published,
        status,
        sweeps,
    })
}
