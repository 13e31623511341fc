//! Special functions: Bessel `J_ν` at integer and half-integer order, `ln Γ`,
//! the Landau constant, and the first critical point of `r^{1-d/2} J_ν(r)`.

mod bessel;
mod gamma;

pub use bessel::{bessel_j, bessel_j_with, BesselOrder, EvalAccuracy};
pub use gamma::log_gamma;

pub(crate) use bessel::{jv, jv_scaled};
pub(crate) use gamma::{gamma_half_integer, gamma_ratio_ln, log_gamma_unchecked};

use crate::error::{Error, Result};

/// `sup_{ν>0, r>0} |r^{1/3} J_ν(r)|`, attained in the limit `ν → 0` at `r ≈ 0.78366`.
pub const LANDAU: f64 = 0.785_746_870_498_512_9;

pub fn landau_constant() -> f64 {
    LANDAU
}

/// Estimate of the first positive zero `j_{ν,1}` (large-order expansion,
/// exact value for `ν = 0`).
pub fn first_zero_estimate(nu: BesselOrder) -> f64 {
    let v = nu.value();
    if v == 0.0 {
        return 2.404_825_557_695_773;
    }
    v + 1.855_757_1 * v.cbrt() + 1.033_150 / v.cbrt()
}

/// A search cap safely beyond the first maximum of `r^{1-d/2} J_ν(r)`.
pub fn default_search_cap(d: u32, k: u32) -> f64 {
    match BesselOrder::for_degree(d, k) {
        Ok(nu) => first_zero_estimate(nu) + 2.0,
        Err(_) => 0.0,
    }
}

const SCAN_STEP: f64 = 0.05;
const BISECT_TOL: f64 = 1e-12;

/// Smallest `r* > 0` solving `k J_ν(r) = r J_{ν+1}(r)` with `ν = d/2 - 1 + k`,
/// i.e. the first local maximum of `r^{1-d/2} J_ν(r)`.
pub fn sup_critical_point(d: u32, k: u32, search_cap: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain(
            "sup_critical_point needs k >= 1 (k = 0 peaks at r = 0)",
        ));
    }
    let nu = BesselOrder::for_degree(d, k)?;
    if !(search_cap > 0.0) || search_cap > EvalAccuracy::default().max_argument {
        return Err(Error::domain(format!(
            "search cap {search_cap} out of range"
        )));
    }
    let kf = f64::from(k);
    let upper = nu.raised(1);
    let f = |r: f64| kf * jv(nu, r) - r * jv(upper, r);

    let mut a = SCAN_STEP.min(search_cap);
    let mut fa = f(a);
    loop {
        let b = (a + SCAN_STEP).min(search_cap);
        if b <= a {
            return Err(Error::NoSignChange { cap: search_cap });
        }
        let fb = f(b);
        if fa > 0.0 && fb <= 0.0 {
            return Ok(bisect(f, a, b));
        }
        a = b;
        fa = fb;
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    // invariant: f(lo) > 0 >= f(hi)
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
