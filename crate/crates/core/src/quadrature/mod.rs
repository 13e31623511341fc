//! Integration of weighted Bessel integrands on `[0, R]` and analytic tail
//! bounds on `[R, ∞)`.
//!
//! The interval is cut into panels of width at most `panel_length`, and
//! panels are further split at every zero of the Bessel factors so that the
//! `|J|^p` kinks (non-even `p`) sit on panel endpoints. Each panel is
//! integrated with a high- and a low-order Gauss rule; their difference is the
//! panel's error estimate. Panels whose estimate exceeds their share of
//! `abs_tol` are halved, at most [`MAX_HALVINGS`] times.
//!
//! The quadrature error is an estimate, not a proof. The tail bounds are
//! rigorous given `|J_ν(r)| ≤ r^{-1/2}` for `ν ≥ 1/2, r ≥ 3ν/2` (and for all
//! `r > 0` when `ν = 0`).

mod gauss;

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use gauss::GaussRule;

use crate::error::{Error, Result};
use crate::specfun::{jv, jv_scaled, BesselOrder, EvalAccuracy};

pub const MAX_HALVINGS: u32 = 12;

/// Certified interval `[lower, upper]` with the contributions that make up
/// its width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lower: f64,
    pub upper: f64,
    /// Tail contribution (one-sided, added to `upper`).
    pub truncation_bound: f64,
    /// Quadrature error (two-sided).
    pub quad_error_bound: f64,
}

impl Enclosure {
    pub fn new(
        lower: f64,
        upper: f64,
        truncation_bound: f64,
        quad_error_bound: f64,
    ) -> Result<Self> {
        let enc = Self {
            lower,
            upper,
            truncation_bound,
            quad_error_bound,
        };
        enc.check()?;
        Ok(enc)
    }

    pub fn point(value: f64) -> Self {
        Self {
            lower: value,
            upper: value,
            truncation_bound: 0.0,
            quad_error_bound: 0.0,
        }
    }

    /// `[value - quad_err, value + quad_err + tail]`.
    pub fn from_parts(value: f64, quad_err: f64, tail: f64) -> Self {
        Self {
            lower: value - quad_err,
            upper: value + quad_err + tail,
            truncation_bound: tail,
            quad_error_bound: quad_err,
        }
    }

    pub fn check(&self) -> Result<()> {
        let ok = self.lower <= self.upper
            && self.truncation_bound >= 0.0
            && self.quad_error_bound >= 0.0
            && self.width()
                <= 2.0 * (self.truncation_bound + self.quad_error_bound) * (1.0 + 1e-12)
                    + 4.0 * f64::EPSILON * self.upper.abs();
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("malformed enclosure {self:?}")))
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }

    /// Separated strict inequality: every point of `self` is below every point of `other`.
    pub fn strictly_below(&self, other: &Enclosure) -> bool {
        self.upper < other.lower
    }

    /// Adds a one-sided tail contribution to the upper end.
    pub fn with_tail(self, tail: f64) -> Self {
        Self {
            upper: self.upper + tail,
            truncation_bound: self.truncation_bound + tail,
            ..self
        }
    }

    /// Image under an increasing map; the width is re-attributed so the
    /// quadrature part stays symmetric and the tail part one-sided.
    pub fn map_increasing(self, f: impl Fn(f64) -> f64) -> Self {
        let lo = f(self.lower);
        let hi = f(self.upper);
        let quad_top = f((self.lower + 2.0 * self.quad_error_bound).min(self.upper));
        Self {
            lower: lo,
            upper: hi,
            truncation_bound: (hi - quad_top).max(0.0),
            quad_error_bound: 0.5 * (quad_top - lo).max(0.0),
        }
    }

    pub fn powf(self, exponent: f64) -> Self {
        assert!(
            exponent >= 0.0 && self.lower >= 0.0,
            "powf needs a non-negative enclosure and exponent"
        );
        self.map_increasing(|x| x.powf(exponent))
    }

    pub fn scale(self, factor: f64) -> Self {
        assert!(factor >= 0.0, "scale factor must be non-negative");
        Self {
            lower: self.lower * factor,
            upper: self.upper * factor,
            truncation_bound: self.truncation_bound * factor,
            quad_error_bound: self.quad_error_bound * factor,
        }
    }

    /// Product of two enclosures of non-negative quantities.
    pub fn mul(self, other: Enclosure) -> Self {
        assert!(
            self.lower >= 0.0 && other.lower >= 0.0,
            "mul needs non-negative enclosures"
        );
        let lo = self.lower * other.lower;
        let hi = self.upper * other.upper;
        let quad_top = ((self.lower + 2.0 * self.quad_error_bound).min(self.upper)
            * (other.lower + 2.0 * other.quad_error_bound).min(other.upper))
        .clamp(lo, hi);
        Self {
            lower: lo,
            upper: hi,
            truncation_bound: hi - quad_top,
            quad_error_bound: 0.5 * (quad_top - lo),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub panel_length: f64,
    pub gauss_order_high: usize,
    pub gauss_order_low: usize,
    pub abs_tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            panel_length: FRAC_PI_2,
            gauss_order_high: 16,
            gauss_order_low: 8,
            abs_tol: 1e-11,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.panel_length > 0.0) {
            return Err(Error::domain("panel_length must be positive"));
        }
        if !(self.gauss_order_high > self.gauss_order_low && self.gauss_order_low >= 2) {
            return Err(Error::domain(
                "need gauss_order_high > gauss_order_low >= 2",
            ));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::domain("abs_tol must be positive"));
        }
        Ok(())
    }
}

/// `2d/(d-1)`: `Λ_{d,p}` is finite exactly for `p` above this.
pub fn critical_exponent(d: u32) -> f64 {
    2.0 * f64::from(d) / (f64::from(d) - 1.0)
}

fn check_admissible(d: u32, p: f64, k: u32, r_max: f64) -> Result<()> {
    if d < 2 {
        return Err(Error::domain(format!(
            "dimension d = {d} must be at least 2"
        )));
    }
    if !(p > critical_exponent(d)) || !p.is_finite() {
        return Err(Error::domain(format!(
            "exponent p = {p} must be finite and exceed 2d/(d-1) = {}",
            critical_exponent(d)
        )));
    }
    let r_limit = EvalAccuracy::default().max_argument;
    if !(r_max > 0.0 && r_max <= r_limit) {
        return Err(Error::domain(format!(
            "truncation radius R = {r_max} must lie in (0, {r_limit}]"
        )));
    }
    let twice_limit = EvalAccuracy::default().max_twice_nu;
    if BesselOrder::for_degree(d, k)?.twice_nu() > twice_limit {
        return Err(Error::domain(format!(
            "order for k = {k} exceeds the supported limit {}",
            f64::from(twice_limit) / 2.0
        )));
    }
    Ok(())
}

/// Enclosure of `∫_0^R |J_ν(r) r^{1-d/2}|^p r^{d-1} dr`, `ν = d/2 - 1 + k`.
/// The tail is not included.
pub fn integrate_weighted_power(
    d: u32,
    p: f64,
    k: u32,
    r_max: f64,
    cfg: &QuadConfig,
) -> Result<Enclosure> {
    check_admissible(d, p, k, r_max)?;
    let integrand = Integrand::power(d, p, k)?;
    integrate(&integrand, r_max, cfg)
}

/// Enclosure of `∫_0^R |J_{d/2-1}|^{p-2} |J_{d/2-1+k}|^2 r^{d-1+p(1-d/2)} dr`.
/// The tail is not included.
pub fn integrate_cross_term(
    d: u32,
    p: f64,
    k: u32,
    r_max: f64,
    cfg: &QuadConfig,
) -> Result<Enclosure> {
    check_admissible(d, p, k, r_max)?;
    let integrand = Integrand::cross(d, p, k)?;
    integrate(&integrand, r_max, cfg)
}

/// Upper bound on `∫_R^∞ |J_ν(r) r^{1-d/2}|^p r^{d-1} dr`:
/// `R^{d - p(d-1)/2} / (p(d-1)/2 - d)`.
pub fn tail_bound(d: u32, p: f64, k: u32, r_max: f64) -> Result<f64> {
    let nu = BesselOrder::for_degree(d, k)?;
    check_tail_radius(nu, r_max)?;
    tail_formula(d, p, r_max)
}

/// Tail bound for the cross integral; both factors obey the same pointwise
/// bound once `R ≥ 3ν/2` for the larger order, so the formula is unchanged.
pub fn cross_tail_bound(d: u32, p: f64, k: u32, r_max: f64) -> Result<f64> {
    let nu0 = BesselOrder::for_degree(d, 0)?;
    let nu = BesselOrder::for_degree(d, k)?;
    check_tail_radius(nu0, r_max)?;
    check_tail_radius(nu, r_max)?;
    tail_formula(d, p, r_max)
}

/// Smallest `R` at which the tail bound for order `ν` is valid.
pub fn tail_threshold(nu: BesselOrder) -> f64 {
    if nu.twice_nu() == 0 {
        0.0
    } else {
        1.5 * nu.value()
    }
}

fn check_tail_radius(nu: BesselOrder, r_max: f64) -> Result<()> {
    if !(r_max > 0.0) || r_max < tail_threshold(nu) {
        return Err(Error::domain(format!(
            "tail bound needs R >= 3ν/2 = {} (ν = {}), got R = {r_max}",
            tail_threshold(nu),
            nu.value()
        )));
    }
    Ok(())
}

fn tail_formula(d: u32, p: f64, r_max: f64) -> Result<f64> {
    let decay = p * (f64::from(d) - 1.0) / 2.0 - f64::from(d);
    if !(decay > 0.0) {
        return Err(Error::domain(format!(
            "tail not integrable: p(d-1)/2 - d = {decay} for d = {d}, p = {p}"
        )));
    }
    Ok(r_max.powf(-decay) / decay)
}

/// Integrand in the form `|F_0(r)|^{p-2} |F_k(r)|^2 r^{d-1}` with
/// `F_j(r) = J_{ν_j}(r) r^{1-d/2}`; the power integrand has both orders equal.
#[derive(Clone, Copy, Debug)]
struct Integrand {
    d: u32,
    p: f64,
    base: BesselOrder,
    order: BesselOrder,
}

impl Integrand {
    fn power(d: u32, p: f64, k: u32) -> Result<Self> {
        let order = BesselOrder::for_degree(d, k)?;
        Ok(Self {
            d,
            p,
            base: order,
            order,
        })
    }

    fn cross(d: u32, p: f64, k: u32) -> Result<Self> {
        Ok(Self {
            d,
            p,
            base: BesselOrder::for_degree(d, 0)?,
            order: BesselOrder::for_degree(d, k)?,
        })
    }

    fn shift(&self) -> f64 {
        f64::from(self.d) / 2.0 - 1.0
    }

    fn eval(&self, r: f64) -> f64 {
        let s = self.shift();
        let weight = r.powi(self.d as i32 - 1);
        let fk = jv_scaled(self.order, s, r).abs();
        if self.base == self.order {
            fk.powf(self.p) * weight
        } else {
            let f0 = jv_scaled(self.base, s, r).abs();
            f0.powf(self.p - 2.0) * fk * fk * weight
        }
    }

    fn orders(&self) -> Vec<BesselOrder> {
        if self.base == self.order {
            vec![self.order]
        } else {
            vec![self.base, self.order]
        }
    }
}

/// Zeros of `J_ν` in `(a, b)`, assuming at most one per sub-interval of
/// length `≤ π/2` (zeros are spaced by more than `π/2` for every ν ≥ 0).
fn zeros_in(nu: BesselOrder, a: f64, b: f64) -> Option<f64> {
    let (fa, fb) = (jv(nu, a), jv(nu, b));
    if fa == 0.0 || fb == 0.0 || (fa > 0.0) == (fb > 0.0) {
        return None;
    }
    let (mut lo, mut hi) = (a, b);
    let lo_positive = fa > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (jv(nu, mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn breakpoints(integrand: &Integrand, r_max: f64, panel_length: f64) -> Vec<f64> {
    let step = panel_length.min(FRAC_PI_2);
    let n = (r_max / step).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(r_max)).collect();
    let orders = integrand.orders();
    let mut pts: Vec<f64> = grid
        .par_windows(2)
        .flat_map_iter(|w| {
            let mut inner: Vec<f64> = orders
                .iter()
                .filter_map(|&nu| zeros_in(nu, w[0], w[1]))
                .collect();
            inner.push(w[1]);
            inner
        })
        .collect();
    pts.insert(0, 0.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1.0));
    pts
}

struct Rules {
    high: GaussRule,
    low: GaussRule,
}

fn panel(
    integrand: &Integrand,
    rules: &Rules,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> (f64, f64, bool) {
    let f = |r: f64| integrand.eval(r);
    let (hi, abs_hi) = rules.high.integrate(a, b, f);
    let (lo, _) = rules.low.integrate(a, b, f);
    let err = (hi - lo).abs() + 16.0 * f64::EPSILON * abs_hi;
    if err <= tol || depth >= MAX_HALVINGS {
        return (hi, err, err <= tol);
    }
    let mid = 0.5 * (a + b);
    let (v1, e1, ok1) = panel(integrand, rules, a, mid, 0.5 * tol, depth + 1);
    let (v2, e2, ok2) = panel(integrand, rules, mid, b, 0.5 * tol, depth + 1);
    (v1 + v2, e1 + e2, ok1 && ok2)
}

fn integrate(integrand: &Integrand, r_max: f64, cfg: &QuadConfig) -> Result<Enclosure> {
    cfg.validate()?;
    let rules = Rules {
        high: GaussRule::new(cfg.gauss_order_high),
        low: GaussRule::new(cfg.gauss_order_low),
    };
    let pts = breakpoints(integrand, r_max, cfg.panel_length);
    let parts: Vec<(f64, f64, bool)> = pts
        .par_windows(2)
        .map(|w| {
            panel(
                integrand,
                &rules,
                w[0],
                w[1],
                cfg.abs_tol * (w[1] - w[0]) / r_max,
                0,
            )
        })
        .collect();
    // ordered summation keeps results identical across thread counts
    let (mut value, mut err) = (0.0, 0.0);
    for (v, e, _) in &parts {
        value += v;
        err += e;
    }
    if err > cfg.abs_tol {
        return Err(Error::QuadratureTolerance {
            estimate: err,
            tolerance: cfg.abs_tol,
        });
    }
    Ok(Enclosure::from_parts(value, err, 0.0))
}
