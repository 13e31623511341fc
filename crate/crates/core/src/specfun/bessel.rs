//! Bessel functions of the first kind at integer and half-integer order.
//!
//! Strategy by region (ν the order, r the argument):
//!
//! - `r² ≤ 4(ν+1)`: power series. No zero of `J_ν` lies in this region, so
//!   the alternating sum loses at most about one digit.
//! - half-integer ν, `r ≥ ν`: closed forms of `J_{1/2}`, `J_{3/2}` and upward
//!   recurrence.
//! - integer ν, `r > 25`, `ν ≤ r`: Hankel asymptotics for `J_0`, `J_1` and
//!   upward recurrence.
//! - otherwise: Miller's downward recurrence. Integer orders are normalized
//!   with `J_0 + 2 Σ J_{2m} = 1`; half-integer orders with the closed form of
//!   whichever of `J_{1/2}`, `J_{3/2}` is larger in magnitude.

use std::f64::consts::{FRAC_2_PI, PI};

use serde::{Deserialize, Serialize};

use super::gamma::log_gamma_unchecked;
use crate::error::{Error, Result};

/// Order `ν` of a Bessel function, stored exactly as the integer `2ν`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BesselOrder {
    twice_nu: u32,
}

impl BesselOrder {
    pub const fn from_twice(twice_nu: u32) -> Self {
        Self { twice_nu }
    }

    /// The order `d/2 - 1 + k` attached to degree-`k` harmonics in dimension `d`.
    pub fn for_degree(d: u32, k: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::domain(format!(
                "dimension d = {d} must be at least 2"
            )));
        }
        k.checked_mul(2)
            .and_then(|k2| k2.checked_add(d - 2))
            .map(Self::from_twice)
            .ok_or_else(|| {
                Error::domain(format!("order d/2 - 1 + k overflows for d = {d}, k = {k}"))
            })
    }

    pub const fn twice_nu(self) -> u32 {
        self.twice_nu
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice_nu) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice_nu % 2 == 0
    }

    /// `ν + by`.
    pub const fn raised(self, by: u32) -> Self {
        Self::from_twice(self.twice_nu + 2 * by)
    }
}

/// Limits and accuracy target for Bessel evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalAccuracy {
    pub target_rel_error: f64,
    pub max_argument: f64,
    pub max_twice_nu: u32,
}

impl Default for EvalAccuracy {
    fn default() -> Self {
        Self {
            target_rel_error: 1e-12,
            max_argument: 1000.0,
            max_twice_nu: 120,
        }
    }
}

impl EvalAccuracy {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_rel_error > 0.0) {
            return Err(Error::domain("target_rel_error must be positive"));
        }
        if !(self.max_argument > 0.0) {
            return Err(Error::domain("max_argument must be positive"));
        }
        Ok(())
    }
}

/// `J_ν(r)` with the default [`EvalAccuracy`] limits.
pub fn bessel_j(nu: BesselOrder, r: f64) -> Result<f64> {
    bessel_j_with(nu, r, &EvalAccuracy::default())
}

pub fn bessel_j_with(nu: BesselOrder, r: f64, acc: &EvalAccuracy) -> Result<f64> {
    acc.validate()?;
    if !(r >= 0.0) {
        return Err(Error::domain(format!(
            "bessel_j: argument {r} must be non-negative"
        )));
    }
    if r > acc.max_argument {
        return Err(Error::domain(format!(
            "bessel_j: argument {r} exceeds max_argument {}",
            acc.max_argument
        )));
    }
    if nu.twice_nu() > acc.max_twice_nu {
        return Err(Error::domain(format!(
            "bessel_j: order {} exceeds the limit {}",
            nu.value(),
            f64::from(acc.max_twice_nu) / 2.0
        )));
    }
    Ok(jv(nu, r))
}

/// `J_ν(r)` without argument checks; `r` must be finite and non-negative.
pub(crate) fn jv(nu: BesselOrder, r: f64) -> f64 {
    let v = nu.value();
    if r == 0.0 {
        return if nu.twice_nu() == 0 { 1.0 } else { 0.0 };
    }
    if r * r <= 4.0 * (v + 1.0) {
        return series(v, r);
    }
    if nu.is_integer() {
        let n = nu.twice_nu() / 2;
        if r > 25.0 && v <= r {
            let (j0, j1) = (hankel(0.0, r), hankel(1.0, r));
            upward(0.0, j0, j1, n, r)
        } else {
            miller_integer(n, r)
        }
    } else {
        let n = (nu.twice_nu() - 1) / 2;
        let (jh, j3h) = half_integer_seeds(r);
        if r >= v {
            upward(0.5, jh, j3h, n, r)
        } else {
            miller_half(n, r, jh, j3h)
        }
    }
}

/// `J_ν(r) · r^{-shift}`, accurate also where `J_ν(r)` alone would underflow
/// or where `r^{-shift}` would overflow.
pub(crate) fn jv_scaled(nu: BesselOrder, shift: f64, r: f64) -> f64 {
    let v = nu.value();
    if r == 0.0 {
        return if v == shift {
            (-(v * std::f64::consts::LN_2) - log_gamma_unchecked(v + 1.0)).exp()
        } else if v > shift {
            0.0
        } else {
            f64::INFINITY
        };
    }
    if r * r <= 4.0 * (v + 1.0) {
        let (prefactor_ln, sum) = series_parts(v, r);
        return (prefactor_ln - shift * r.ln()).exp() * sum;
    }
    jv(nu, r) * r.powf(-shift)
}

/// `ln[(r/2)^ν / Γ(ν+1)]` and `Σ (-r²/4)^m / (m! (ν+1)_m)`.
fn series_parts(v: f64, r: f64) -> (f64, f64) {
    let q = -0.25 * r * r;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200 {
        let mf = f64::from(m);
        term *= q / (mf * (mf + v));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    (v * (0.5 * r).ln() - log_gamma_unchecked(v + 1.0), sum)
}

fn series(v: f64, r: f64) -> f64 {
    let (ln_pre, sum) = series_parts(v, r);
    ln_pre.exp() * sum
}

fn half_integer_seeds(r: f64) -> (f64, f64) {
    let amp = (FRAC_2_PI / r).sqrt();
    let (s, c) = r.sin_cos();
    (amp * s, amp * (s / r - c))
}

/// Upward recurrence `J_{μ+1} = (2μ/r) J_μ - J_{μ-1}` from `J_{base}`,
/// `J_{base+1}` to `J_{base+n}`.
fn upward(base: f64, j_lo: f64, j_hi: f64, n: u32, r: f64) -> f64 {
    if n == 0 {
        return j_lo;
    }
    let (mut prev, mut cur) = (j_lo, j_hi);
    for m in 1..n {
        let mu = base + f64::from(m);
        let next = 2.0 * mu / r * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn miller_start(n: u32, r: f64) -> u32 {
    let m = f64::from(n).max(r);
    let start = (m + 30.0 + (50.0 * m).sqrt()).ceil() as u32;
    start + start % 2
}

const RESCALE_AT: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

fn miller_integer(n: u32, r: f64) -> f64 {
    let start = miller_start(n, r);
    let two_over_r = 2.0 / r;
    let (mut above, mut cur) = (0.0_f64, 1.0_f64);
    let mut even_sum = 0.0;
    let mut target = 0.0;
    for k in (1..=start).rev() {
        let below = f64::from(k) * two_over_r * cur - above;
        above = cur;
        cur = below;
        let idx = k - 1;
        if idx == n {
            target = cur;
        }
        if idx > 0 && idx % 2 == 0 {
            even_sum += cur;
        }
        if cur.abs() > RESCALE_AT {
            cur *= RESCALE_BY;
            above *= RESCALE_BY;
            even_sum *= RESCALE_BY;
            target *= RESCALE_BY;
        }
    }
    target / (cur + 2.0 * even_sum)
}

fn miller_half(n: u32, r: f64, jh: f64, j3h: f64) -> f64 {
    // index m stands for order m + 1/2
    let start = miller_start(n + 1, r);
    let (mut above, mut cur) = (0.0_f64, 1.0_f64);
    let mut target = 0.0;
    for m in (1..=start).rev() {
        let mu = f64::from(m) + 0.5;
        let below = 2.0 * mu / r * cur - above;
        above = cur;
        cur = below;
        let idx = m - 1;
        if idx == n {
            target = cur;
        }
        if cur.abs() > RESCALE_AT {
            cur *= RESCALE_BY;
            above *= RESCALE_BY;
            target *= RESCALE_BY;
        }
    }
    // cur and above now hold the unnormalized J_{1/2} and J_{3/2}
    if jh.abs() >= j3h.abs() {
        target * (jh / cur)
    } else {
        target * (j3h / above)
    }
}

/// Hankel asymptotic expansion of `J_ν(r)`, used for `ν ∈ {0, 1}`, `r > 25`.
fn hankel(v: f64, r: f64) -> f64 {
    let mu = 4.0 * v * v;
    let eight_r = 8.0 * r;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = f64::from(2 * k - 1);
        term *= (mu - odd * odd) / (f64::from(k) * eight_r);
        if term.abs() >= last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = r - (0.5 * v + 0.25) * PI;
    (FRAC_2_PI / r).sqrt() * (p * chi.cos() - q * chi.sin())
}
